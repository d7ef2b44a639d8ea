#pragma once

/// @file checkpoint.hpp
/// @brief Solver state persistence: a plain text matrix of nodal values next
///        to a JSON sidecar carrying {N, lambda, mu, p, grid} so a run can be
///        resumed or audited without the producing configuration.

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

#include "hslab/fiber.hpp"
#include "hslab/grid.hpp"

namespace hslab {

struct Checkpoint {
    AxisymField u;
    FunctionalParams params;
};

inline void save_checkpoint(const std::string& path, const AxisymField& u,
                            const FunctionalParams& fp) {
    validate(u);
    if (u.dim.N != fp.dim.N)
        throw std::invalid_argument("field dimension does not match parameters");
    std::ofstream matrix(path);
    if (!matrix) throw std::runtime_error("cannot open " + path + " for writing");
    matrix.precision(17);
    for (int i = 0; i <= u.grid.n_rho; ++i) {
        for (int j = 0; j <= u.grid.n_xN; ++j)
            matrix << u.at(i, j) << (j == u.grid.n_xN ? '\n' : ' ');
    }

    nlohmann::json side;
    side["N"] = fp.dim.N;
    side["lambda"] = fp.lambda;
    side["mu"] = fp.mu;
    side["p"] = fp.p;
    side["grid"] = {{"R_rho", u.grid.R_rho},
                    {"R_xN", u.grid.R_xN},
                    {"n_rho", u.grid.n_rho},
                    {"n_xN", u.grid.n_xN},
                    {"cluster", u.grid.cluster}};
    std::ofstream sidecar(path + ".json");
    if (!sidecar) throw std::runtime_error("cannot open " + path + ".json for writing");
    sidecar << side.dump(2) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream sidecar(path + ".json");
    if (!sidecar) throw std::runtime_error("cannot open " + path + ".json");
    nlohmann::json side;
    try {
        sidecar >> side;
        Grid g;
        g.R_rho = side.at("grid").at("R_rho").get<double>();
        g.R_xN = side.at("grid").at("R_xN").get<double>();
        g.n_rho = side.at("grid").at("n_rho").get<int>();
        g.n_xN = side.at("grid").at("n_xN").get<int>();
        g.cluster = side.at("grid").at("cluster").get<double>();
        const Dimension dim(side.at("N").get<int>());
        const FunctionalParams fp(dim, side.at("lambda").get<double>(),
                                  side.at("mu").get<double>(), side.at("p").get<double>());

        AxisymField u(g, dim);
        std::ifstream matrix(path);
        if (!matrix) throw std::runtime_error("cannot open " + path);
        for (double& v : u.values)
            if (!(matrix >> v)) throw std::runtime_error("checkpoint mismatch");
        double extra;
        if (matrix >> extra) throw std::runtime_error("checkpoint mismatch");
        validate(u);
        return {std::move(u), fp};
    } catch (const nlohmann::json::exception&) {
        throw std::runtime_error("checkpoint mismatch");
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("checkpoint mismatch");
    }
}

} // namespace hslab
