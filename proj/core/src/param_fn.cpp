#include "fbsde/param_fn.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbsde {

Eigen::VectorXd ParamFn::forward_point(double t, const Eigen::VectorXd& x, Mode mode) {
    Eigen::VectorXd ts(1);
    ts[0] = t;
    Eigen::MatrixXd xs(x.size(), 1);
    xs.col(0) = x;
    return forward(ts, xs, mode).col(0);
}

void save_params(const ParamFn& fn, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("save_params: cannot open " + path);
    const Eigen::VectorXd& p = fn.params();
    const Eigen::VectorXd aux = fn.aux_state();
    os << "fbsde-params 1 " << fn.architecture() << ' ' << p.size() << ' ' << aux.size() << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
        os << buf << '\n';
    }
    for (Eigen::Index i = 0; i < aux.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", aux[i]);
        os << buf << '\n';
    }
}

void load_params(ParamFn& fn, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_params: cannot open " + path);
    std::string magic, arch;
    int version = 0;
    Eigen::Index n_params = 0, n_aux = 0;
    is >> magic >> version >> arch >> n_params >> n_aux;
    if (magic != "fbsde-params" || version != 1)
        throw std::runtime_error("load_params: unrecognized snapshot header in " + path);
    if (arch != fn.architecture())
        throw std::runtime_error("load_params: snapshot is for architecture '" + arch +
                                 "', target is '" + fn.architecture() + "'");
    if (n_params != fn.params().size() || n_aux != fn.aux_state().size())
        throw std::runtime_error("load_params: size mismatch in " + path);
    Eigen::VectorXd p(n_params), aux(n_aux);
    for (Eigen::Index i = 0; i < n_params; ++i)
        if (!(is >> p[i])) throw std::runtime_error("load_params: truncated snapshot " + path);
    for (Eigen::Index i = 0; i < n_aux; ++i)
        if (!(is >> aux[i])) throw std::runtime_error("load_params: truncated snapshot " + path);
    fn.set_params(p);
    fn.set_aux_state(aux);
}

} // namespace fbsde
