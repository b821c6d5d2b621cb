#pragma once

#include <vector>

#include "radarmot/radar.hpp"

namespace radarmot {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Reciprocal-condition floor below which an innovation covariance is treated
/// as singular.
inline constexpr double kSingularRcond = 1e-12;

/// Planar constant-velocity Kalman state: [x, y, vx, vy].
struct KfState {
  Vec4 x = Vec4::Zero();
  Mat4 P = Mat4::Identity();
  double t = 0.0;

  Vec2 position() const { return x.head<2>(); }
  Vec2 velocity() const { return x.tail<2>(); }
};

/// Constant-velocity transition with white-acceleration process noise.
struct ProcessModel {
  double q_accel = 1.0;  // acceleration noise density, (m/s^2)^2

  static Mat4 transition(double dt) {
    Mat4 f = Mat4::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
  }

  Mat4 process_noise(double dt) const {
    const double dt2 = dt * dt;
    const double a = 0.25 * dt2 * dt2;
    const double b = 0.5 * dt2 * dt;
    Mat4 q = Mat4::Zero();
    q(0, 0) = q(1, 1) = a;
    q(0, 2) = q(2, 0) = b;
    q(1, 3) = q(3, 1) = b;
    q(2, 2) = q(3, 3) = dt2;
    return q * q_accel;
  }
};

/// Stacked radial-velocity observation built from gated radar returns.
struct RadarObservation {
  Eigen::VectorXd z;       // measured radial speeds, one per return
  Eigen::MatrixXd H;       // M x 4; position columns are zero
  Eigen::VectorXd r_diag;  // per-row measurement variance
  std::vector<RadarPoint> points;
};

/// Planar center measurement from the detector.
struct DetectionObservation {
  Vec2 z = Vec2::Zero();
  Eigen::Matrix2d R_det = Eigen::Matrix2d::Identity();
};

inline KfState kf_predict(const KfState& state, const ProcessModel& model, double dt) {
  if (dt < 0.0) {
    throw NegativeDt("prediction over a negative time step");
  }
  const Mat4 f = ProcessModel::transition(dt);
  KfState out = state;
  out.x = f * state.x;
  out.P = f * state.P * f.transpose() + model.process_noise(dt);
  out.t = state.t + dt;
  return out;
}

namespace detail {

/// Joseph-form linear measurement update shared by both observation channels.
inline KfState kf_linear_update(const KfState& state, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& z, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd S = H * state.P * H.transpose() + R;
  const Eigen::MatrixXd S_sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S_sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || lo < kSingularRcond * hi) {
    throw SingularInnovationCovariance("innovation covariance is ill-conditioned");
  }
  const Eigen::MatrixXd PHt = state.P * H.transpose();
  const Eigen::MatrixXd K = S_sym.llt().solve(PHt.transpose()).transpose();
  KfState out = state;
  out.x = state.x + K * (z - H * state.x);
  const Mat4 ikh = Mat4::Identity() - K * H;
  out.P = ikh * state.P * ikh.transpose() + K * R * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

}  // namespace detail

inline KfState kf_update_detection(const KfState& state, const DetectionObservation& obs) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 4);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return detail::kf_linear_update(state, h, obs.z, obs.R_det);
}

/// Stacks one radial-velocity row per radar return. Row i projects the planar
/// state velocity onto return i's line of sight; the position columns stay
/// zero, so radial updates never move the position estimate directly.
inline RadarObservation build_radar_observation(const std::vector<RadarPoint>& points,
                                                double sigma_radial) {
  if (points.empty()) {
    throw EmptyPointSet("a radar observation needs at least one return");
  }
  const int m = static_cast<int>(points.size());
  RadarObservation obs;
  obs.z.resize(m);
  obs.H = Eigen::MatrixXd::Zero(m, 4);
  obs.r_diag = Eigen::VectorXd::Constant(m, sigma_radial * sigma_radial);
  obs.points = points;
  for (int i = 0; i < m; ++i) {
    const RadarPoint& p = points[i];
    const Eigen::RowVector3d row = p.los.transpose() * p.rot_ref_to_sensor();
    obs.H(i, 2) = row(0);
    obs.H(i, 3) = row(1);
    obs.z(i) = p.v_radial;
  }
  return obs;
}

inline KfState kf_update_radar(const KfState& state, const RadarObservation& obs) {
  const Eigen::MatrixXd r = obs.r_diag.asDiagonal();
  return detail::kf_linear_update(state, obs.H, obs.z, r);
}

}  // namespace radarmot
