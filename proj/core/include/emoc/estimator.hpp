#pragma once

// Residual a posteriori error estimator for the coupled state/adjoint/
// control system, plus data-oscillation terms.
//
// Element terms (all L2 norms over the element, scaled by h_T except the
// projection defect):
//   state:    h_T ||f + u - sigma y_h||,   h_T ||div f||
//   adjoint:  h_T ||curl y_d + sigma p_h||,   ||p_h - P_h p_h||
// (the divergence-type adjoint term vanishes identically for element-wise
// constant sigma p_h and is pinned to zero).
// Interior face terms, scaled by h_F^(1/2): tangential jumps of
// mu^{-1} curl y_h and of curl y_h - mu^{-1} curl p_h, normal jumps of
// f + u - sigma y_h and of sigma p_h.  Each face contributes half its
// squared value to both neighbours.
//
// The marked quantity adds the lower-order control-data oscillation
// (deliberately not h-scaled):
//   eta_hat^2(T) = eta^2(T) + ||u_d - P_h u_d||_T^2.
// Oscillations of y_d and f are diagnostics only.

#include <vector>

#include "emoc/control.hpp"
#include "emoc/problems.hpp"
#include "emoc/spaces.hpp"
#include "emoc/types.hpp"

namespace emoc {

struct ElementResiduals {
  double eta_y1 = 0.0; // h_T ||f + u - sigma y_h||
  double eta_y2 = 0.0; // h_T ||div f||
  double eta_p1 = 0.0; // h_T ||curl y_d + sigma p_h||
  double eta_p2 = 0.0; // identically zero
  double eta_p3 = 0.0; // ||p_h - P_h p_h||
};

struct FaceResiduals {
  double eta_y1 = 0.0; // h_F^(1/2) ||[tangential mu^{-1} curl y_h]||
  double eta_y2 = 0.0; // h_F^(1/2) ||[normal (f + u - sigma y_h)]||
  double eta_p1 = 0.0; // h_F^(1/2) ||[tangential (curl y_h - mu^{-1} curl p_h)]||
  double eta_p2 = 0.0; // h_F^(1/2) ||[normal sigma p_h]||
};

struct IndicatorReport {
  // Squared contributions per tet.
  std::vector<double> element_sq; // sum of squared element terms
  std::vector<double> face_sq;    // half-sum of incident face terms, squared
  std::vector<double> eta_sq;     // element_sq + face_sq
  std::vector<double> osc_ud_sq;  // control-data oscillation
  std::vector<double> eta_hat_sq; // eta_sq + osc_ud_sq

  double total_eta_sq = 0.0;
  double total_osc_ud_sq = 0.0;
  double total_eta_hat_sq = 0.0;
  int argmax_tet = -1; // largest eta_hat_sq, ties to the lowest id
};

// Element terms of one tet.  Volume data uses geometric labels.
ElementResiduals element_residuals(const LevelAssets& assets,
                                   const KKTSolution& kkt, int t);

// Jump terms of one interior face (global face id); passing a boundary
// face throws InputError.  Data traces evaluate per side with the
// element labels.
FaceResiduals face_residuals(const LevelAssets& assets, const KKTSolution& kkt,
                             int f);

// ||u_d - P_h u_d||_T (lower-order data oscillation; no h factor).
double oscillation_ud(const LevelAssets& assets, int t);

// Full indicator field for the current solution.
IndicatorReport assemble_indicator(const LevelAssets& assets,
                                   const KKTSolution& kkt);

// Diagnostic data oscillations (never marked on): per tet,
//   osc_yd = h_T ||curl(y_d - I_h y_d)||_T
//   osc_f  = h_T ||f - P_h f||_{div,T} + sum_F h_F^(1/2) ||[normal (f - P_h f)]||_F
// with I_h the edge interpolant and the face sum over interior faces
// (half-weighted per side, consistent with the indicator split).
struct OscillationDiagnostics {
  std::vector<double> osc_yd;
  std::vector<double> osc_f;
};

OscillationDiagnostics oscillation_diagnostics(const LevelAssets& assets);

} // namespace emoc
