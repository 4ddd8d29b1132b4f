#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace parabolic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class SizeMismatch : public InvalidInput {
 public:
  SizeMismatch(long lhs, long rhs)
      : InvalidInput("size mismatch: " + std::to_string(lhs) + " vs " +
                     std::to_string(rhs)) {}
};

class NearSingular : public Error {
 public:
  explicit NearSingular(double condition)
      : Error("Cayley transform: (I - x) is ill-conditioned (cond = " +
              std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class NotParabolic : public Error {
 public:
  NotParabolic(int puncture, double excess)
      : Error("cocycle is not parabolic at puncture " +
              std::to_string(puncture) + " (cokernel component " +
              std::to_string(excess) + ")"),
        puncture_(puncture),
        excess_(excess) {}
  int puncture() const { return puncture_; }
  double excess() const { return excess_; }

 private:
  int puncture_;
  double excess_;
};

class Reducible : public Error {
 public:
  Reducible() : Error("representation is reducible") {}
};

class NotSmooth : public Error {
 public:
  explicit NotSmooth(int h2)
      : Error("relative H^2 (traceless part) has dimension " +
              std::to_string(h2)),
        h2_(h2) {}
  int h2() const { return h2_; }

 private:
  int h2_;
};

/// The order-`order` linear system of the formal deformation is
/// inconsistent. The least-squares residual is a representative of the
/// obstruction class in relative H^2.
class ObstructionFound : public Error {
 public:
  ObstructionFound(int order, Eigen::VectorXd residual)
      : Error("obstruction at order " + std::to_string(order) +
              " (residual norm " + std::to_string(residual.norm()) + ")"),
        order_(order),
        residual_(std::move(residual)) {}
  int order() const { return order_; }
  const Eigen::VectorXd& residual() const { return residual_; }
  double residual_norm() const { return residual_.norm(); }

 private:
  int order_;
  Eigen::VectorXd residual_;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(double best_residual)
      : Error("solver did not converge (best residual " +
              std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace parabolic
