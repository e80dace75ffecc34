#pragma once

#include <stdexcept>
#include <string>

namespace oscswap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// R(t) stopped being positive-definite (or a solve went singular) at time t.
class DesignSingularity : public Error {
 public:
  DesignSingularity(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

// Solved potential matrix is not real-symmetric within tolerance.
class DesignViolation : public Error {
 public:
  DesignViolation(const std::string& what, double t, double residual)
      : Error(what), t_(t), residual_(residual) {}
  double time() const { return t_; }
  double residual() const { return residual_; }

 private:
  double t_;
  double residual_;
};

class IntegrationAccuracy : public Error {
 public:
  IntegrationAccuracy(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NoPerfectTransfer : public Error {
 public:
  NoPerfectTransfer(const std::string& what, double lambda_best, double b_best)
      : Error(what), lambda_best_(lambda_best), b_best_(b_best) {}
  double lambda_best() const { return lambda_best_; }
  double b_best() const { return b_best_; }

 private:
  double lambda_best_;
  double b_best_;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class PropagationQuality : public Error {
 public:
  using Error::Error;
};

class MeshCoverage : public Error {
 public:
  MeshCoverage(const std::string& what, double tail) : Error(what), tail_(tail) {}
  double tail() const { return tail_; }

 private:
  double tail_;
};

}  // namespace oscswap
