#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "demobandit/expert.hpp"

namespace demobandit {

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(where + ": bad number '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(where + ": trailing junk in number '" + s + "'");
    return v;
}

}  // namespace detail

// Plain-text dataset: `# key=value` header lines, then one `action,reward`
// record per line. Rewards are kept to full double precision.
inline void write_dataset(const OfflineDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "# n=" << ds.pairs.size() << "\n";
    if (ds.meta) {
        const DatasetMeta& m = *ds.meta;
        out << "# K=" << m.actions.num_actions() << "\n";
        out << "# d=" << m.actions.dim() << "\n";
        out << "# kind=" << to_string(m.actions.kind) << "\n";
        out << "# policy=" << to_string(m.policy) << "\n";
        out << "# beta_true=" << detail::format_double(m.competence.beta) << "\n";
        out << "# inv_lambda_true=" << detail::format_double(m.competence.inv_lambda) << "\n";
        out << "# env_seed=" << m.env_seed << "\n";
        if (m.vartheta) {
            out << "# vartheta=";
            for (int i = 0; i < m.vartheta->size(); ++i)
                out << (i ? " " : "") << detail::format_double((*m.vartheta)(i));
            out << "\n";
        }
        if (m.actions.kind == ActionSetKind::UnitSphere) {
            for (int k = 0; k < m.actions.num_actions(); ++k) {
                out << "# action_" << k << "=";
                for (int i = 0; i < m.actions.dim(); ++i)
                    out << (i ? " " : "") << detail::format_double(m.actions.vectors(i, k));
                out << "\n";
            }
        }
    }
    for (const auto& [a, r] : ds.pairs)
        out << a << "," << detail::format_double(r) << "\n";
    if (!out) throw ParseError(path + ": write failed");
}

inline OfflineDataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");

    OfflineDataset ds;
    int K = -1, d = -1;
    long declared_n = -1;
    std::string kind, policy;
    double beta_true = 0.0, inv_lambda_true = 0.0;
    std::uint64_t env_seed = 0;
    Vector vartheta;
    std::map<int, Vector> sphere_actions;
    bool have_meta = false;

    std::string line;
    int lineno = 0;
    auto where = [&] { return path + ":" + std::to_string(lineno); };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const auto start = body.find_first_not_of(' ');
            if (start == std::string::npos) continue;
            body = body.substr(start);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;  // free-form comment
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "n") {
                declared_n = std::strtol(value.c_str(), nullptr, 10);
            } else if (key == "K") {
                K = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
                have_meta = true;
            } else if (key == "d") {
                d = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
            } else if (key == "kind") {
                kind = value;
            } else if (key == "policy") {
                policy = value;
            } else if (key == "beta_true") {
                beta_true = detail::parse_double(value, where());
            } else if (key == "inv_lambda_true") {
                inv_lambda_true = detail::parse_double(value, where());
            } else if (key == "env_seed") {
                env_seed = std::strtoull(value.c_str(), nullptr, 10);
            } else if (key == "vartheta" || key.rfind("action_", 0) == 0) {
                std::istringstream iss(value);
                std::vector<double> vals;
                std::string tok;
                while (iss >> tok) vals.push_back(detail::parse_double(tok, where()));
                Vector v = Eigen::Map<Vector>(vals.data(), static_cast<long>(vals.size()));
                if (key == "vartheta")
                    vartheta = v;
                else
                    sphere_actions[static_cast<int>(std::strtol(key.c_str() + 7, nullptr, 10))] = v;
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(where() + ": expected 'action_index,reward'");
        int action = 0;
        try {
            std::size_t pos = 0;
            action = std::stoi(line.substr(0, comma), &pos);
            if (pos != comma) throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            throw ParseError(where() + ": bad action index '" + line.substr(0, comma) + "'");
        }
        if (action < 0) throw ParseError(where() + ": negative action index");
        if (K >= 0 && action >= K)
            throw ParseError(where() + ": action index " + std::to_string(action) +
                             " out of range for K=" + std::to_string(K));
        ds.pairs.emplace_back(action, detail::parse_double(line.substr(comma + 1), where()));
    }
    if (declared_n >= 0 && declared_n != static_cast<long>(ds.pairs.size()))
        throw ParseError(path + ": header declares n=" + std::to_string(declared_n) +
                         " but file holds " + std::to_string(ds.pairs.size()) + " records");

    if (have_meta) {
        DatasetMeta meta;
        meta.competence = Competence{beta_true, inv_lambda_true};
        meta.policy = policy == "epsilon_greedy" ? ExpertPolicy::EpsilonGreedy
                                                 : ExpertPolicy::Softmax;
        meta.env_seed = env_seed;
        if (kind == "unit_sphere") {
            if (static_cast<int>(sphere_actions.size()) != K || d < 1)
                throw ParseError(path + ": unit-sphere dataset must list all K action vectors");
            Matrix vecs(d, K);
            for (const auto& [idx, v] : sphere_actions) {
                if (idx < 0 || idx >= K || v.size() != d)
                    throw ParseError(path + ": bad action vector action_" + std::to_string(idx));
                vecs.col(idx) = v;
            }
            meta.actions = ActionSet::unit_sphere(std::move(vecs));
        } else {
            meta.actions = ActionSet::basis(K);
        }
        if (vartheta.size() > 0) meta.vartheta = vartheta;
        ds.meta = std::move(meta);
    }
    return ds;
}

}  // namespace demobandit
