#pragma once

#include "acmdp/mdp.hpp"

#include <json.hpp>

#include <fstream>

namespace acmdp {

/// Serializes a FiniteMdp to the interchange format: dense kernel tables,
/// row order = state order.
inline nlohmann::json mdp_to_json(const FiniteMdp& mdp) {
    nlohmann::json j;
    j["states"] = mdp.states;
    j["actions"] = mdp.actions;
    j["admissible"] = mdp.admissible;
    j["cost"] = mdp.cost;
    std::vector<std::vector<numvec>> dense(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); s++) {
        dense[s].resize(mdp.num_actions(s));
        for (std::size_t a = 0; a < mdp.num_actions(s); a++) {
            numvec row(mdp.num_states(), 0.0);
            const SparseRow& sp = mdp.kernel[s][a];
            for (std::size_t i = 0; i < sp.size(); i++) row[std::size_t(sp.index[i])] = sp.prob[i];
            dense[s][a] = std::move(row);
        }
    }
    j["kernel"] = dense;
    j["weight"] = mdp.weight;
    j["model_class"] = to_string(mdp.model_class);
    return j;
}

/// Parses the interchange format. Kernel rows must sum to 1 within 1e-9;
/// rows are renormalized exactly afterwards and zero entries dropped.
inline FiniteMdp mdp_from_json(const nlohmann::json& j) {
    FiniteMdp mdp;
    try {
        mdp.states = j.at("states").get<numvec>();
        mdp.actions = j.at("actions").get<numvec>();
        mdp.admissible = j.at("admissible").get<std::vector<std::vector<int>>>();
        mdp.cost = j.at("cost").get<std::vector<numvec>>();
        std::string mc = j.at("model_class").get<std::string>();
        if (mc == "PC")
            mdp.model_class = ModelClass::PC;
        else if (mc == "UC")
            mdp.model_class = ModelClass::UC;
        else
            throw ModelError("model_class must be PC or UC");
        mdp.weight = j.at("weight").get<numvec>();

        auto dense = j.at("kernel").get<std::vector<std::vector<numvec>>>();
        mdp.kernel.resize(dense.size());
        for (std::size_t s = 0; s < dense.size(); s++) {
            mdp.kernel[s].resize(dense[s].size());
            for (std::size_t a = 0; a < dense[s].size(); a++) {
                const numvec& row = dense[s][a];
                if (row.size() != mdp.states.size()) throw ModelError("kernel row length mismatch", long(s));
                double sum = 0.0;
                for (double p : row) {
                    if (p < 0.0) throw ModelError("negative kernel entry", long(s));
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    throw ModelError("kernel row sum off by more than 1e-9", long(s));
                SparseRow sp;
                for (std::size_t y = 0; y < row.size(); y++)
                    if (row[y] > 0.0) sp.push(int(y), row[y] / sum);
                mdp.kernel[s][a] = std::move(sp);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed MDP document: ") + e.what());
    }
    validate(mdp);
    return mdp;
}

inline void write_mdp_file(const FiniteMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << mdp_to_json(mdp).dump(1) << "\n";
}

inline FiniteMdp read_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return mdp_from_json(j);
}

} // namespace acmdp
