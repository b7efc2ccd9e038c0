#include "fbsde/mlp_bn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fbsde {

namespace {

// Segment offsets: gamma(p), beta(p), W1(h*p), b1(h), W2(m*h), b2(m).
struct Layout {
    int p, h, m;
    int gamma() const { return 0; }
    int beta() const { return p; }
    int w1() const { return 2 * p; }
    int b1() const { return 2 * p + h * p; }
    int w2() const { return 2 * p + h * p + h; }
    int b2() const { return 2 * p + h * p + h + m * h; }
    int total() const { return 2 * p + h * p + h + m * h + m; }
};

} // namespace

MlpBN::MlpBN(int state_dim, int output_dim, std::uint64_t seed, bool zero_output_init)
    : state_dim_(state_dim), output_dim_(output_dim) {
    if (state_dim < 0 || output_dim < 1)
        throw std::invalid_argument("MlpBN: bad dimensions");
    const Layout lay{input_dim(), kHidden, output_dim_};
    params_ = Eigen::VectorXd::Zero(lay.total());
    grad_ = Eigen::VectorXd::Zero(lay.total());
    running_mean_ = Eigen::VectorXd::Zero(lay.p);
    running_var_ = Eigen::VectorXd::Ones(lay.p);

    params_.segment(lay.gamma(), lay.p).setOnes();

    std::mt19937_64 rng(seed);
    auto fill_uniform = [&rng](Eigen::Ref<Eigen::VectorXd> dst, double bound) {
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < dst.size(); ++i) dst[i] = dist(rng);
    };
    fill_uniform(params_.segment(lay.w1(), lay.h * lay.p), 1.0 / std::sqrt(lay.p));
    fill_uniform(params_.segment(lay.b1(), lay.h), 1.0 / std::sqrt(lay.p));
    if (!zero_output_init) {
        fill_uniform(params_.segment(lay.w2(), lay.m * lay.h), 1.0 / std::sqrt(lay.h));
        fill_uniform(params_.segment(lay.b2(), lay.m), 1.0 / std::sqrt(lay.h));
    }
}

std::string MlpBN::architecture() const {
    return "mlp-bn/" + std::to_string(state_dim_) + "/" + std::to_string(kHidden) + "/" +
           std::to_string(output_dim_);
}

Eigen::Map<const Eigen::MatrixXd> MlpBN::w1() const {
    const Layout lay{input_dim(), kHidden, output_dim_};
    return {params_.data() + lay.w1(), lay.h, lay.p};
}

auto MlpBN::b1() const {
    const Layout lay{input_dim(), kHidden, output_dim_};
    return params_.segment(lay.b1(), lay.h);
}

Eigen::Map<const Eigen::MatrixXd> MlpBN::w2() const {
    const Layout lay{input_dim(), kHidden, output_dim_};
    return {params_.data() + lay.w2(), lay.m, lay.h};
}

auto MlpBN::b2() const {
    const Layout lay{input_dim(), kHidden, output_dim_};
    return params_.segment(lay.b2(), lay.m);
}

void MlpBN::set_params(const Eigen::VectorXd& p) {
    if (p.size() != params_.size()) throw std::invalid_argument("MlpBN::set_params: size mismatch");
    params_ = p;
}

Eigen::MatrixXd MlpBN::forward(const Eigen::VectorXd& t, const Eigen::MatrixXd& x, Mode mode) {
    if (x.rows() != state_dim_ || x.cols() != t.size())
        throw std::invalid_argument("MlpBN::forward: batch shape mismatch");
    const Eigen::Index n = t.size();
    if (n == 0) throw std::invalid_argument("MlpBN::forward: empty batch");
    const int p = input_dim();

    Eigen::MatrixXd input(p, n);
    input.row(0) = t.transpose();
    input.bottomRows(state_dim_) = x;

    Eigen::VectorXd mu(p), var(p);
    if (mode == Mode::train) {
        mu = input.rowwise().mean();
        var = (input.colwise() - mu).array().square().rowwise().mean().matrix();
        running_mean_ = (1.0 - kBnMomentum) * running_mean_ + kBnMomentum * mu;
        running_var_ = (1.0 - kBnMomentum) * running_var_ + kBnMomentum * var;
    } else {
        mu = running_mean_;
        var = running_var_;
    }

    const Eigen::ArrayXd inv_std = (var.array() + kBnEps).sqrt().inverse();
    cache_xhat_ = ((input.colwise() - mu).array().colwise() * inv_std).matrix();
    cache_bn_out_ =
        ((cache_xhat_.array().colwise() * gamma().array()).colwise() + beta().array()).matrix();
    cache_h1_ = ((w1() * cache_bn_out_).colwise() + b1()).array().tanh().matrix();
    has_cache_ = true;
    return (w2() * cache_h1_).colwise() + b2();
}

void MlpBN::backward(const Eigen::MatrixXd& upstream) {
    if (!has_cache_) throw std::logic_error("MlpBN::backward before forward");
    if (upstream.rows() != output_dim_ || upstream.cols() != cache_h1_.cols())
        throw std::invalid_argument("MlpBN::backward: upstream shape mismatch");
    const Layout lay{input_dim(), kHidden, output_dim_};

    // Output layer.
    Eigen::MatrixXd d_w2 = upstream * cache_h1_.transpose();
    Eigen::VectorXd d_b2 = upstream.rowwise().sum();
    // Hidden layer through tanh.
    Eigen::MatrixXd d_pre1 =
        ((w2().transpose() * upstream).array() * (1.0 - cache_h1_.array().square())).matrix();
    Eigen::MatrixXd d_w1 = d_pre1 * cache_bn_out_.transpose();
    Eigen::VectorXd d_b1 = d_pre1.rowwise().sum();
    // Batch-norm scale/shift. The normalization statistics depend on the inputs
    // only, so no gradient flows through them.
    Eigen::MatrixXd d_bn = w1().transpose() * d_pre1;
    Eigen::VectorXd d_gamma = (d_bn.array() * cache_xhat_.array()).rowwise().sum().matrix();
    Eigen::VectorXd d_beta = d_bn.rowwise().sum();

    grad_.segment(lay.gamma(), lay.p) += d_gamma;
    grad_.segment(lay.beta(), lay.p) += d_beta;
    grad_.segment(lay.w1(), lay.h * lay.p) += Eigen::Map<Eigen::VectorXd>(d_w1.data(), d_w1.size());
    grad_.segment(lay.b1(), lay.h) += d_b1;
    grad_.segment(lay.w2(), lay.m * lay.h) += Eigen::Map<Eigen::VectorXd>(d_w2.data(), d_w2.size());
    grad_.segment(lay.b2(), lay.m) += d_b2;
}

Eigen::VectorXd MlpBN::value(double t, const Eigen::VectorXd& x) const {
    if (x.size() != state_dim_) throw std::invalid_argument("MlpBN::value: state dim mismatch");
    const int p = input_dim();
    Eigen::VectorXd input(p);
    input[0] = t;
    input.tail(state_dim_) = x;
    const Eigen::ArrayXd inv_std = (running_var_.array() + kBnEps).sqrt().inverse();
    Eigen::VectorXd bn =
        (gamma().array() * ((input - running_mean_).array() * inv_std) + beta().array()).matrix();
    Eigen::VectorXd h1 = ((w1() * bn) + b1()).array().tanh().matrix();
    return (w2() * h1) + b2();
}

std::unique_ptr<ParamFn> MlpBN::clone() const { return std::make_unique<MlpBN>(*this); }

Eigen::VectorXd MlpBN::aux_state() const {
    Eigen::VectorXd s(2 * input_dim());
    s << running_mean_, running_var_;
    return s;
}

void MlpBN::set_aux_state(const Eigen::VectorXd& s) {
    if (s.size() != 2 * input_dim())
        throw std::invalid_argument("MlpBN::set_aux_state: size mismatch");
    running_mean_ = s.head(input_dim());
    running_var_ = s.tail(input_dim());
}

} // namespace fbsde
