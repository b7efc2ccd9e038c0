#include "fbsde/linear_family.hpp"

#include <stdexcept>
#include <utility>

namespace fbsde {

LinearBasisFn::LinearBasisFn(int state_dim, int output_dim, std::vector<Basis> bases,
                             Eigen::VectorXd theta0)
    : state_dim_(state_dim), output_dim_(output_dim), bases_(std::move(bases)),
      theta_(std::move(theta0)) {
    if (state_dim_ < 0 || output_dim_ < 0)
        throw std::invalid_argument("LinearBasisFn: negative dimension");
    if (theta_.size() != static_cast<Eigen::Index>(bases_.size()))
        throw std::invalid_argument("LinearBasisFn: theta0 size must match basis count");
    grad_ = Eigen::VectorXd::Zero(theta_.size());
}

std::string LinearBasisFn::architecture() const {
    return "linear/" + std::to_string(bases_.size()) + "/" + std::to_string(output_dim_) + "/" +
           std::to_string(state_dim_);
}

void LinearBasisFn::set_params(const Eigen::VectorXd& p) {
    if (p.size() != theta_.size())
        throw std::invalid_argument("LinearBasisFn::set_params: size mismatch");
    theta_ = p;
}

Eigen::MatrixXd LinearBasisFn::forward(const Eigen::VectorXd& t, const Eigen::MatrixXd& x,
                                       Mode) {
    if (x.rows() != state_dim_ || x.cols() != t.size())
        throw std::invalid_argument("LinearBasisFn::forward: batch shape mismatch");
    cached_basis_.clear();
    cached_basis_.reserve(bases_.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(output_dim_, t.size());
    for (std::size_t k = 0; k < bases_.size(); ++k) {
        cached_basis_.push_back(bases_[k](t, x));
        out += theta_[static_cast<Eigen::Index>(k)] * cached_basis_.back();
    }
    has_cache_ = true;
    return out;
}

void LinearBasisFn::backward(const Eigen::MatrixXd& upstream) {
    if (!has_cache_) throw std::logic_error("LinearBasisFn::backward before forward");
    for (std::size_t k = 0; k < bases_.size(); ++k) {
        if (upstream.rows() != cached_basis_[k].rows() ||
            upstream.cols() != cached_basis_[k].cols())
            throw std::invalid_argument("LinearBasisFn::backward: upstream shape mismatch");
        grad_[static_cast<Eigen::Index>(k)] +=
            (upstream.array() * cached_basis_[k].array()).sum();
    }
}

Eigen::VectorXd LinearBasisFn::value(double t, const Eigen::VectorXd& x) const {
    Eigen::VectorXd ts(1);
    ts[0] = t;
    Eigen::MatrixXd xs(x.size(), 1);
    xs.col(0) = x;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(output_dim_);
    for (std::size_t k = 0; k < bases_.size(); ++k)
        out += theta_[static_cast<Eigen::Index>(k)] * bases_[k](ts, xs).col(0);
    return out;
}

std::unique_ptr<ParamFn> LinearBasisFn::clone() const {
    return std::make_unique<LinearBasisFn>(*this);
}

LinearBasisFn zero_fn(int state_dim, int output_dim) {
    return LinearBasisFn(state_dim, output_dim, {}, Eigen::VectorXd(0));
}

LinearBasisFn example1_z_family(int n, Example1Param param, double theta0) {
    LinearBasisFn::Basis basis;
    if (param == Example1Param::well_specified) {
        basis = [](const Eigen::VectorXd&, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
            return 2.0 * x;
        };
    } else {
        basis = [](const Eigen::VectorXd&, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
            return 4.0 * x * x.colwise().squaredNorm().asDiagonal();
        };
    }
    Eigen::VectorXd theta(1);
    theta[0] = theta0;
    return LinearBasisFn(n, n, {std::move(basis)}, std::move(theta));
}

LinearBasisFn example1_y_family(int n, Example1Param param, double theta0) {
    LinearBasisFn::Basis basis;
    if (param == Example1Param::well_specified) {
        basis = [](const Eigen::VectorXd&, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
            return x.colwise().squaredNorm();
        };
    } else {
        basis = [](const Eigen::VectorXd&, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
            return x.colwise().squaredNorm().array().square().matrix();
        };
    }
    Eigen::VectorXd theta(1);
    theta[0] = theta0;
    return LinearBasisFn(n, 1, {std::move(basis)}, std::move(theta));
}

} // namespace fbsde
