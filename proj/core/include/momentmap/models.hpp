#pragma once

#include "momentmap/linalg.hpp"
#include "momentmap/model.hpp"
#include "momentmap/tensor.hpp"

namespace momentmap {

// ---- Cartesian -> polar ---------------------------------------------------

/// (r, theta) = (|x|, atan2(y, x)). The quadrant-aware angle is regular at
/// points on the y axis such as (0, 1000).
template <Real T>
Vector<T> polar_transform(const Vector<T>& xy);

/// Value, Jacobian and Hessians of the polar map at m, evaluated in T.
/// Throws OriginSingularity when |m| < 1e-9.
template <Real T>
SecondOrderModel<T> polar_model_at(const Vector<T>& m);

// ---- Van der Pol flow -----------------------------------------------------

struct VdpConfig {
  double mu = 0.5;
  double t0 = 0.0;
  double tf = 1.0;
  double step = 1e-3;

  // Throws std::invalid_argument unless tf >= t0, step > 0 and all are finite.
  void validate() const;
  // Number of uniform RK4 steps covering [t0, tf] with spacing <= step.
  long steps() const;
};

template <Real T>
struct VdpFlowResult {
  Vector<T> state;       // x(tf)
  Matrix<T> stm;         // Phi(tf) = dx(tf)/dx0
  HessianStack<T> stt;   // Psi(tf) = d^2 x(tf)/dx0^2
};

/// Right-hand side x' = [x2, mu (1 - x1^2) x2 - x1].
template <Real T>
Vector<T> vdp_rhs(const Vector<T>& x, T mu);

/// Integrates the state together with its first and second variational
/// equations using fixed-step classical RK4:
///   Phi' = A Phi,   Psi'^i_jk = A^i_a Psi^a_jk + H^i_ab Phi^a_j Phi^b_k,
/// with A and H the first and second derivatives of the vector field.
/// Config values are rounded to T once; all arithmetic is in T.
template <Real T>
VdpFlowResult<T> vdp_flow(const Vector<T>& x0, const VdpConfig& cfg);

/// Flow map wrapped as a SecondOrderModel: (x(tf), Phi, Psi) at m.
template <Real T>
SecondOrderModel<T> vdp_model_at(const Vector<T>& m, const VdpConfig& cfg);

/// rotation(alpha) * diag(sigma, beta * sigma). This is a general square-root
/// factor, not a lower-triangular one.
Matrix<double> vdp_input_sqrt(double alpha, double beta, double sigma);

}  // namespace momentmap
