#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "momentmap/models.hpp"

namespace momentmap {

namespace {

// Augmented state: x (2), Phi row-major (4), Psi[i][j][k] (8).
template <class T>
using Augmented = std::array<T, 14>;

constexpr int phi_at(int i, int j) { return 2 + 2 * i + j; }
constexpr int psi_at(int i, int j, int k) { return 6 + 4 * i + 2 * j + k; }

template <class T>
Augmented<T> augmented_rhs(const Augmented<T>& z, T mu) {
  const T x1 = z[0];
  const T x2 = z[1];

  // A = df/dx, H2 = d^2 f_2 / dx^2 (f_1 is linear).
  const T a10 = T(-1) - T(2) * mu * x1 * x2;
  const T a11 = mu * (T(1) - x1 * x1);
  const std::array<std::array<T, 2>, 2> a{{{T(0), T(1)}, {a10, a11}}};
  const T h00 = T(-2) * mu * x2;
  const T h01 = T(-2) * mu * x1;
  const std::array<std::array<T, 2>, 2> h2{{{h00, h01}, {h01, T(0)}}};

  Augmented<T> dz{};
  dz[0] = x2;
  dz[1] = a11 * x2 - x1;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      dz[phi_at(i, j)] = a[i][0] * z[phi_at(0, j)] + a[i][1] * z[phi_at(1, j)];
    }
  }

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = j; k < 2; ++k) {
        T acc = a[i][0] * z[psi_at(0, j, k)] + a[i][1] * z[psi_at(1, j, k)];
        if (i == 1) {
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) acc += h2[p][q] * z[phi_at(p, j)] * z[phi_at(q, k)];
        }
        dz[psi_at(i, j, k)] = acc;
        dz[psi_at(i, k, j)] = acc;
      }
    }
  }
  return dz;
}

template <class T>
Augmented<T> axpy(const Augmented<T>& z, T h, const Augmented<T>& k) {
  Augmented<T> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = z[i] + h * k[i];
  return out;
}

}  // namespace

void VdpConfig::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(t0) || !std::isfinite(tf) || !std::isfinite(step)) {
    throw std::invalid_argument("VdpConfig: non-finite parameter");
  }
  if (tf < t0) throw std::invalid_argument("VdpConfig: tf must not precede t0");
  if (!(step > 0.0)) throw std::invalid_argument("VdpConfig: step must be positive");
}

long VdpConfig::steps() const {
  const double span = tf - t0;
  if (span == 0.0) return 0;
  return static_cast<long>(std::ceil(span / step * (1.0 - 1e-12)));
}

template <Real T>
Vector<T> vdp_rhs(const Vector<T>& x, T mu) {
  if (x.size() != 2) throw DimensionMismatch("vdp_rhs: state must be 2-dimensional");
  Vector<T> out(2);
  out << x(1), mu * (T(1) - x(0) * x(0)) * x(1) - x(0);
  return out;
}

template <Real T>
VdpFlowResult<T> vdp_flow(const Vector<T>& x0, const VdpConfig& cfg) {
  cfg.validate();
  if (x0.size() != 2) throw DimensionMismatch("vdp_flow: state must be 2-dimensional");
  require_finite(x0, "vdp_flow");

  const long n_steps = cfg.steps();
  const T mu = static_cast<T>(cfg.mu);
  const T h = n_steps > 0 ? static_cast<T>((cfg.tf - cfg.t0) / double(n_steps)) : T(0);
  const T half_h = h / T(2);
  const T sixth_h = h / T(6);

  Augmented<T> z{};
  z[0] = x0(0);
  z[1] = x0(1);
  z[phi_at(0, 0)] = T(1);
  z[phi_at(1, 1)] = T(1);

  for (long s = 0; s < n_steps; ++s) {
    const Augmented<T> k1 = augmented_rhs(z, mu);
    const Augmented<T> k2 = augmented_rhs(axpy(z, half_h, k1), mu);
    const Augmented<T> k3 = augmented_rhs(axpy(z, half_h, k2), mu);
    const Augmented<T> k4 = augmented_rhs(axpy(z, h, k3), mu);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += sixth_h * (k1[i] + T(2) * k2[i] + T(2) * k3[i] + k4[i]);
    }
    if (!std::isfinite(z[0]) || !std::isfinite(z[1])) {
      throw IntegrationDiverged("vdp_flow: state became non-finite at step " + std::to_string(s));
    }
  }

  VdpFlowResult<T> out;
  out.state = Vector<T>(2);
  out.state << z[0], z[1];
  out.stm = Matrix<T>(2, 2);
  out.stm << z[phi_at(0, 0)], z[phi_at(0, 1)], z[phi_at(1, 0)], z[phi_at(1, 1)];
  out.stt = HessianStack<T>(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out.stt(i, j, k) = z[psi_at(i, j, k)];
  require_finite(out.stm, "vdp_flow STM");
  return out;
}

template <Real T>
SecondOrderModel<T> vdp_model_at(const Vector<T>& m, const VdpConfig& cfg) {
  VdpFlowResult<T> flow = vdp_flow<T>(m, cfg);
  return SecondOrderModel<T>(std::move(flow.state), std::move(flow.stm), std::move(flow.stt));
}

Matrix<double> vdp_input_sqrt(double alpha, double beta, double sigma) {
  if (!(sigma > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("vdp_input_sqrt: sigma and beta must be positive");
  }
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Matrix<double> rot(2, 2);
  rot << c, -s,
         s, c;
  Matrix<double> scale = Matrix<double>::Zero(2, 2);
  scale(0, 0) = sigma;
  scale(1, 1) = beta * sigma;
  return rot * scale;
}

template Vector<float> vdp_rhs<float>(const Vector<float>&, float);
template Vector<double> vdp_rhs<double>(const Vector<double>&, double);
template VdpFlowResult<float> vdp_flow<float>(const Vector<float>&, const VdpConfig&);
template VdpFlowResult<double> vdp_flow<double>(const Vector<double>&, const VdpConfig&);
template SecondOrderModel<float> vdp_model_at<float>(const Vector<float>&, const VdpConfig&);
template SecondOrderModel<double> vdp_model_at<double>(const Vector<double>&, const VdpConfig&);

}  // namespace momentmap
