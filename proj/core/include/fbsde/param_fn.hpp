#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fbsde {

enum class Mode { train, eval };

// Trainable function (t, x) -> R^m with analytic parameter gradients.
//
// The batch calls are the training surface: forward() caches what backward()
// needs, and backward() accumulates d(objective)/d(params) into grad() given the
// per-sample upstream gradients d(objective)/d(output). Samples are columns.
// value() is the rollout surface: eval-mode, const, touches no cache.
class ParamFn {
public:
    virtual ~ParamFn() = default;

    [[nodiscard]] virtual int state_dim() const = 0;
    [[nodiscard]] virtual int output_dim() const = 0;
    [[nodiscard]] virtual std::string architecture() const = 0;

    [[nodiscard]] virtual const Eigen::VectorXd& params() const = 0;
    virtual void set_params(const Eigen::VectorXd& p) = 0;
    [[nodiscard]] const Eigen::VectorXd& grad() const { return grad_; }
    void zero_grad() { grad_.setZero(); }

    // t: N, x: state_dim x N; returns output_dim x N.
    virtual Eigen::MatrixXd forward(const Eigen::VectorXd& t, const Eigen::MatrixXd& x,
                                    Mode mode) = 0;
    // upstream: output_dim x N, matching the last forward() batch.
    // Throws std::logic_error if no forward pass preceded it.
    virtual void backward(const Eigen::MatrixXd& upstream) = 0;

    [[nodiscard]] virtual Eigen::VectorXd value(double t, const Eigen::VectorXd& x) const = 0;

    [[nodiscard]] virtual std::unique_ptr<ParamFn> clone() const = 0;

    [[nodiscard]] Eigen::VectorXd forward_point(double t, const Eigen::VectorXd& x, Mode mode);

    // Non-trainable state carried alongside the parameters (e.g. running batch
    // statistics). Serialized with snapshots; empty for stateless architectures.
    [[nodiscard]] virtual Eigen::VectorXd aux_state() const { return {}; }
    virtual void set_aux_state(const Eigen::VectorXd& s) {
        if (s.size() != 0) throw std::invalid_argument("set_aux_state: architecture carries none");
    }

protected:
    Eigen::VectorXd grad_;
};

// Snapshot format (text, versioned): a header line
//   fbsde-params 1 <architecture> <param-count> <state-count>
// followed by one %.17g value per line, parameters first, then auxiliary state
// (running statistics for architectures that carry them).
void save_params(const ParamFn& fn, const std::string& path);
void load_params(ParamFn& fn, const std::string& path);

} // namespace fbsde
