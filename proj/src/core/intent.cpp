#include "core/intent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace vgrasp {

namespace {

// Relative singular-value cutoff for the plane fits. Singular values of A
// below max_sv * 1e-5 are treated as zero, which matches a condition number
// of 1e10 on the normal matrix A^T A.
constexpr double kPlaneRankTolerance = 1e-5;

// Residual below which a track counts as exactly collinear.
constexpr double kCollinearTolerance = 1e-9;

Eigen::Vector3d solve_plane(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& response) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(predictors, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kPlaneRankTolerance);
  return svd.solve(response);
}

struct PcaLine {
  Point3 centroid = Point3::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double max_residual = 0.0;
};

PcaLine principal_axis_line(const WristTrack& track) {
  PcaLine out;
  for (const Point3& p : track) out.centroid += p;
  out.centroid /= static_cast<double>(track.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : track) {
    const Eigen::Vector3d r = p - out.centroid;
    cov += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  out.axis = eig.eigenvectors().col(2).normalized();  // largest eigenvalue

  for (const Point3& p : track) {
    const Eigen::Vector3d r = p - out.centroid;
    out.max_residual = std::max(out.max_residual, (r - out.axis * out.axis.dot(r)).norm());
  }
  return out;
}

double max_line_residual(const RegressionLine& line, const WristTrack& track) {
  double worst = 0.0;
  for (const Point3& p : track) worst = std::max(worst, line.point_distance(p));
  return worst;
}

struct Ranked {
  const SceneObject* object = nullptr;
  double distance = std::numeric_limits<double>::max();
};

// Best and runner-up by distance; ties prefer the lexicographically
// smaller id.
std::pair<Ranked, Ranked> rank_two(const std::vector<const SceneObject*>& pool,
                                   const std::function<double(const SceneObject&)>& metric) {
  Ranked best, second;
  for (const SceneObject* obj : pool) {
    const double d = metric(*obj);
    const bool beats_best = d < best.distance ||
                            (d == best.distance && best.object != nullptr &&
                             obj->id < best.object->id);
    if (beats_best) {
      second = best;
      best = Ranked{obj, d};
    } else if (d < second.distance ||
               (d == second.distance && second.object != nullptr && obj->id < second.object->id)) {
      second = Ranked{obj, d};
    }
  }
  return {best, second};
}

double confidence_from(const Ranked& best, const Ranked& second, size_t pool_size) {
  if (pool_size <= 1) return 1.0;
  const double total = best.distance + second.distance;
  if (total <= 0.0) return 0.5;
  return 1.0 - best.distance / total;
}

Eigen::Matrix3d sorted_right_handed_axes(const PointCloud& cloud, const Point3& centroid) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : cloud) {
    const Eigen::Vector3d r = p - centroid;
    cov += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Matrix3d axes;
  // Descending eigenvalue order.
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  axes.col(2) = eig.eigenvectors().col(0);
  if (axes.determinant() < 0.0) axes.col(2) = -axes.col(2);
  return axes;
}

Point3 cloud_centroid(const PointCloud& cloud) {
  Point3 c = Point3::Zero();
  for (const Point3& p : cloud) c += p;
  return c / static_cast<double>(cloud.size());
}

// Mean squared nearest-neighbor distance of the transformed source against
// the target, plus the matched target point per source point.
double nn_pass(const PointCloud& source, const Eigen::Matrix3d& rotation,
               const Eigen::Vector3d& translation, const Eigen::Matrix3Xd& target,
               std::vector<Eigen::Vector3d>* matches) {
  double sum = 0.0;
  if (matches != nullptr) matches->resize(source.size());
  for (size_t i = 0; i < source.size(); ++i) {
    const Eigen::Vector3d moved = rotation * source[i] + translation;
    Eigen::Index best = 0;
    const double d2 = (target.colwise() - moved).colwise().squaredNorm().minCoeff(&best);
    sum += d2;
    if (matches != nullptr) (*matches)[i] = target.col(best);
  }
  return std::sqrt(sum / static_cast<double>(source.size()));
}

void kabsch(const PointCloud& source, const std::vector<Eigen::Vector3d>& matches,
            Eigen::Matrix3d* rotation, Eigen::Vector3d* translation) {
  const Point3 cs = cloud_centroid(source);
  Eigen::Vector3d ct = Eigen::Vector3d::Zero();
  for (const Eigen::Vector3d& m : matches) ct += m;
  ct /= static_cast<double>(matches.size());

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < source.size(); ++i) {
    h += (source[i] - cs) * (matches[i] - ct).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d v = svd.matrixV();
    v.col(2) = -v.col(2);
    r = v * svd.matrixU().transpose();
  }
  *rotation = r;
  *translation = ct - r * cs;
}

}  // namespace

RegressionLine fit_trajectory_line(const WristTrack& track) {
  if (track.size() < 3) {
    throw Error(ErrorCode::kTooFewPositions,
                std::to_string(track.size()) + " positions, need at least 3");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(track.size());
  Eigen::MatrixXd a1(n, 3), a2(n, 3);
  Eigen::VectorXd bx(n), by(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point3& p = track[i];
    a1.row(i) << p.y(), p.z(), 1.0;
    bx(i) = p.x();
    a2.row(i) << p.x(), p.z(), 1.0;
    by(i) = p.y();
  }

  RegressionLine line;
  line.plane1_w = solve_plane(a1, bx);
  line.plane2_w = solve_plane(a2, by);

  const Eigen::Vector3d n1(1.0, -line.plane1_w[0], -line.plane1_w[1]);
  const Eigen::Vector3d n2(-line.plane2_w[0], 1.0, -line.plane2_w[1]);
  const Eigen::Vector3d cross = n1.cross(n2);

  const PcaLine pca = principal_axis_line(track);
  const bool collinear = pca.max_residual <= kCollinearTolerance;

  bool use_pca = false;
  if (cross.norm() < 1e-9) {
    if (!collinear) {
      throw Error(ErrorCode::kParallelPlanes, "regression plane normals are parallel");
    }
    use_pca = true;
  } else {
    line.direction = cross.normalized();
    // Point on the line: minimum-norm solution of the two plane equations.
    Eigen::Matrix<double, 2, 3> planes;
    planes.row(0) = n1.transpose();
    planes.row(1) = n2.transpose();
    Eigen::Vector2d offsets(line.plane1_w[2], line.plane2_w[2]);
    line.point = planes.completeOrthogonalDecomposition().solve(offsets);
    // The intersection of the fitted planes cannot represent axis-aligned
    // degenerate orientations (for example a purely vertical track); an
    // exactly collinear track whose line the intersection misses falls back
    // to the principal axis.
    if (collinear && max_line_residual(line, track) > kCollinearTolerance) {
      use_pca = true;
    }
  }

  if (use_pca) {
    line.point = pca.centroid;
    line.direction = pca.axis;
  }

  const Eigen::Vector3d motion = track.back() - track.front();
  if (line.direction.dot(motion) < 0.0) line.direction = -line.direction;
  return line;
}

SeparationPlane separation_plane(const RegressionLine& line) {
  const Eigen::Vector3d vertical = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d cross = line.direction.cross(vertical);
  // |cross| = sin(angle to vertical); parallel directions cannot span the
  // separating plane.
  if (cross.norm() < 1e-6) {
    throw Error(ErrorCode::kDegenerateDirection, "trajectory direction is vertical");
  }
  Eigen::Vector3d normal = cross.normalized();
  if (normal.x() > 0.0) normal = -normal;
  if (normal.x() == 0.0) {
    throw Error(ErrorCode::kDegenerateDirection,
                "trajectory direction has no forward component");
  }
  SeparationPlane plane;
  plane.ws.head<3>() = normal;
  plane.ws[3] = -normal.dot(line.point);
  return plane;
}

IntentEstimate estimate_target(const RegressionLine& line,
                               const std::vector<SceneObject>& objects,
                               Handedness handedness) {
  if (objects.empty()) {
    throw Error(ErrorCode::kNoObjects, "no objects to choose from");
  }

  const auto line_metric = [&line](const SceneObject& obj) {
    return line.point_distance(obj.position);
  };

  if (objects.size() == 1) {
    IntentEstimate est;
    est.target_id = objects[0].id;
    est.line_distance = line_metric(objects[0]);
    est.in_left_space = true;
    est.confidence = 1.0;
    return est;
  }

  const SeparationPlane plane = separation_plane(line);
  const double sign = handedness == Handedness::kRight ? 1.0 : -1.0;

  std::vector<const SceneObject*> candidates;
  for (const SceneObject& obj : objects) {
    if (sign * plane.signed_value(obj.position) > 0.0) candidates.push_back(&obj);
  }

  IntentEstimate est;
  est.fallback_used = candidates.empty();
  if (est.fallback_used) {
    for (const SceneObject& obj : objects) candidates.push_back(&obj);
  }

  const auto [best, second] = rank_two(candidates, line_metric);
  est.target_id = best.object->id;
  est.line_distance = best.distance;
  est.in_left_space = !est.fallback_used;
  est.confidence = confidence_from(best, second, candidates.size());
  return est;
}

IntentEstimate estimate_target_sphere_baseline(const Point3& hand,
                                               const std::vector<SceneObject>& objects,
                                               double radius) {
  if (objects.empty()) {
    throw Error(ErrorCode::kNoObjects, "no objects to choose from");
  }
  const auto hand_metric = [&hand](const SceneObject& obj) {
    return (obj.position - hand).norm();
  };

  std::vector<const SceneObject*> in_range;
  for (const SceneObject& obj : objects) {
    if (hand_metric(obj) <= radius) in_range.push_back(&obj);
  }

  IntentEstimate est;
  est.fallback_used = in_range.empty();
  if (est.fallback_used) {
    for (const SceneObject& obj : objects) in_range.push_back(&obj);
  }

  const auto [best, second] = rank_two(in_range, hand_metric);
  est.target_id = best.object->id;
  est.line_distance = best.distance;
  est.in_left_space = !est.fallback_used;
  est.confidence = confidence_from(best, second, in_range.size());
  return est;
}

RegistrationResult register_clouds(const PointCloud& source, const PointCloud& target) {
  constexpr size_t kMinPoints = 4;
  if (source.size() < kMinPoints || target.size() < kMinPoints) {
    throw Error(ErrorCode::kTooFewPoints, "registration needs at least 4 points per cloud");
  }

  Eigen::Matrix3Xd target_mat(3, static_cast<Eigen::Index>(target.size()));
  for (size_t i = 0; i < target.size(); ++i) target_mat.col(static_cast<Eigen::Index>(i)) = target[i];

  const Point3 cs = cloud_centroid(source);
  const Point3 ct = cloud_centroid(target);
  const Eigen::Matrix3d vs = sorted_right_handed_axes(source, cs);
  const Eigen::Matrix3d vt = sorted_right_handed_axes(target, ct);

  // Coarse stage: principal-axis alignment, sampling the four sign
  // hypotheses that keep the rotation proper, scored by consensus error.
  RegistrationResult best;
  double best_rmse = std::numeric_limits<double>::max();
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      Eigen::Vector3d signs(static_cast<double>(s1), static_cast<double>(s2),
                            static_cast<double>(s1 * s2));
      const Eigen::Matrix3d r = vt * signs.asDiagonal() * vs.transpose();
      const Eigen::Vector3d t = ct - r * cs;
      const double rmse = nn_pass(source, r, t, target_mat, nullptr);
      if (rmse < best_rmse) {
        best_rmse = rmse;
        best.rotation = r;
        best.translation = t;
      }
    }
  }

  // Fine stage: point-to-point ICP.
  constexpr int kMaxIterations = 50;
  constexpr double kRelativeTolerance = 1e-8;
  std::vector<Eigen::Vector3d> matches;
  double prev_rmse = std::numeric_limits<double>::max();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double rmse = nn_pass(source, best.rotation, best.translation, target_mat, &matches);
    best.rmse = rmse;
    best.rmse_history.push_back(rmse);
    if (rmse == 0.0 || std::abs(prev_rmse - rmse) <= kRelativeTolerance * prev_rmse) break;
    prev_rmse = rmse;
    kabsch(source, matches, &best.rotation, &best.translation);
  }
  return best;
}

ValidationResult validate_gesture_entry(const GestureLibraryEntry& entry,
                                        const PointCloud& observed_cloud,
                                        const SizeParams& observed_size) {
  const double gate = 0.10 * observed_size.radius;
  ValidationResult result;
  if (entry.model_cloud.size() >= 4 && observed_cloud.size() >= 4) {
    // Symmetric post-alignment residual: the forward pass alone can stay
    // small when one cloud nests inside a larger one (a scaled-up object),
    // so the reverse nearest-neighbor pass must agree before the entry
    // applies.
    const RegistrationResult reg = register_clouds(entry.model_cloud, observed_cloud);
    Eigen::Matrix3Xd model_mat(3, static_cast<Eigen::Index>(entry.model_cloud.size()));
    for (size_t i = 0; i < entry.model_cloud.size(); ++i) {
      model_mat.col(static_cast<Eigen::Index>(i)) = entry.model_cloud[i];
    }
    const Eigen::Matrix3d inv_rot = reg.rotation.transpose();
    const double backward =
        nn_pass(observed_cloud, inv_rot, -(inv_rot * reg.translation), model_mat, nullptr);
    result.rmse = std::max(reg.rmse, backward);
  } else {
    // Size-only comparison: half the worst extent difference approximates a
    // surface offset. Extents are sorted so orientation does not matter.
    Eigen::Vector3d a = entry.size.extents;
    Eigen::Vector3d b = observed_size.extents;
    std::sort(a.data(), a.data() + 3);
    std::sort(b.data(), b.data() + 3);
    result.rmse = 0.5 * (a - b).cwiseAbs().maxCoeff();
  }
  result.ok = result.rmse <= gate;
  return result;
}

}  // namespace vgrasp
