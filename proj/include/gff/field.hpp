#pragma once

#include <Eigen/Dense>

#include "gff/lattice.hpp"

namespace gff {

// A real-valued function on a lattice domain, implicitly zero outside it.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(DomainPtr dom, Eigen::VectorXd values)
      : dom_(std::move(dom)), v_(std::move(values)) {
    if (v_.size() != dom_->size())
      throw std::invalid_argument("ScalarField: size mismatch");
  }

  static ScalarField zero(DomainPtr dom) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dom->size());
    return {std::move(dom), std::move(v)};
  }
  static ScalarField constant(DomainPtr dom, double c) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(dom->size(), c);
    return {std::move(dom), std::move(v)};
  }

  // Evaluation anywhere on Z^2; exact zero off the domain.
  double at(Site s) const {
    const int i = dom_->index_of(s);
    return i < 0 ? 0.0 : v_[i];
  }

  const Eigen::VectorXd& values() const { return v_; }
  Eigen::VectorXd& values() { return v_; }
  const LatticeDomain& domain() const { return *dom_; }
  const DomainPtr& domain_ptr() const { return dom_; }

 private:
  DomainPtr dom_;
  Eigen::VectorXd v_;
};

}  // namespace gff
