// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "layerlab/analysis.hpp"
#include "layerlab/common.hpp"
#include "layerlab/scenario.hpp"

namespace layerlab {

/// Everything a run needs, loaded from one JSON config file (flat key/value
/// tree; the only environment override is the output directory).
struct RunConfig {
    std::string catalog_id = "default";
    ParamMap params;
    double L = 2.0 * pi;
    double T = 1.0;
    double c0 = 1.0;
    SweepConfig sweep;
    std::string output_dir = "out";
    bool dump_fields = false;

    Scenario scenario() const { return make_scenario(catalog_id, params, L, T, c0); }
};

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
    }

    RunConfig c;
    try {
        if (j.contains("scenario")) {
            const auto& sj = j["scenario"];
            c.catalog_id = sj.value("catalog_id", c.catalog_id);
            c.L = sj.value("L", c.L);
            c.T = sj.value("T", c.T);
            c.c0 = sj.value("c0", c.c0);
            if (sj.contains("params"))
                for (auto it = sj["params"].begin(); it != sj["params"].end(); ++it)
                    c.params[it.key()] = it.value().get<double>();
        }
        if (j.contains("grid")) {
            const auto& gj = j["grid"];
            c.sweep.policy.nx = gj.value("nx", c.sweep.policy.nx);
            c.sweep.policy.nz = gj.value("nz", c.sweep.policy.nz);
            c.sweep.policy.graded = gj.value("graded", c.sweep.policy.graded);
            c.sweep.policy.wall_refine = gj.value("wall_refine", c.sweep.policy.wall_refine);
            c.sweep.policy.min_layer_nodes =
                gj.value("layer_nodes", c.sweep.policy.min_layer_nodes);
        }
        if (j.contains("time")) {
            const auto& tj = j["time"];
            c.sweep.policy.stamps = tj.value("stamps", c.sweep.policy.stamps);
            c.sweep.policy.cfl = tj.value("cfl", c.sweep.policy.cfl);
            c.sweep.policy.dt_hmin_factor =
                tj.value("dt_hmin_factor", c.sweep.policy.dt_hmin_factor);
            c.sweep.policy.corrector_substeps =
                tj.value("corrector_substeps", c.sweep.policy.corrector_substeps);
        }
        if (j.contains("corrector")) {
            const auto& cj = j["corrector"];
            c.sweep.z_max = cj.value("z_max", c.sweep.z_max);
            c.sweep.nZ = cj.value("nZ", c.sweep.nZ);
        }
        if (j.contains("sweep")) {
            const auto& wj = j["sweep"];
            if (wj.contains("eps_list"))
                c.sweep.eps_list = wj["eps_list"].get<std::vector<double>>();
            c.sweep.delta = wj.value("delta", c.sweep.delta);
            std::string audit = wj.value("audit", std::string("full"));
            if (audit == "full") c.sweep.audit = SweepConfig::Audit::full;
            else if (audit == "smallest") c.sweep.audit = SweepConfig::Audit::smallest;
            else if (audit == "off") c.sweep.audit = SweepConfig::Audit::off;
            else throw ConfigError("sweep.audit must be full|smallest|off");
            c.sweep.audit_threshold = wj.value("audit_threshold", c.sweep.audit_threshold);
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.sweep.jobs = j.value("jobs", c.sweep.jobs);
        c.dump_fields = j.value("dump_fields", c.dump_fields);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field error in ") + path + ": " + e.what());
    }
    if (const char* env = std::getenv("LAYERLAB_OUTPUT_DIR")) c.output_dir = env;
    return c;
}

// ---------------------------------------------------------------------------
// Deterministic CSV / plot-data emission (17 significant digits, C locale)

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : f_(std::fopen(path.c_str(), "w")) {
        if (!f_) throw ConfigError("cannot open output file: " + path);
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            std::fprintf(f_, "%s%c", cells[i].c_str(), i + 1 == cells.size() ? '\n' : ',');
    }

private:
    std::FILE* f_;
};

inline void write_error_report_csv(const std::string& path, const ErrorReport& r) {
    CsvWriter w(path);
    w.row({"eps", "quantity", "value"});
    for (int q = 0; q < Q_COUNT; ++q)
        w.row({fmt17(r.epsilon), quantity_name(q), fmt17(r.value[q])});
    w.row({fmt17(r.epsilon), "aniso_lhs", fmt17(r.aniso.lhs)});
    w.row({fmt17(r.epsilon), "aniso_rhs", fmt17(r.aniso.rhs)});
    w.row({fmt17(r.epsilon), "aniso_ratio", fmt17(r.aniso.ratio)});
    w.row({fmt17(r.epsilon), "resolution_audit", fmt17(r.resolution_audit)});
    if (r.audited)
        for (int q = 0; q < Q_COUNT; ++q)
            if (quantity_audited(q))
                w.row({fmt17(r.epsilon), std::string("audit_") + quantity_name(q),
                       fmt17(r.audit[q])});
}

inline void write_sweep_csv(const std::string& path, const SweepReport& rep) {
    CsvWriter w(path);
    w.row({"eps", "quantity", "value"});
    for (const auto& r : rep.reports) {
        for (int q = 0; q < Q_COUNT; ++q)
            w.row({fmt17(r.epsilon), quantity_name(q), fmt17(r.value[q])});
        w.row({fmt17(r.epsilon), "aniso_ratio", fmt17(r.aniso.ratio)});
        w.row({fmt17(r.epsilon), "resolution_audit", fmt17(r.resolution_audit)});
    }
}

inline void write_fits_csv(const std::string& path, const SweepReport& rep) {
    CsvWriter w(path);
    w.row({"quantity", "slope", "intercept", "r2", "n_points"});
    for (const auto& qf : rep.fits) {
        if (!qf.valid) {
            w.row({qf.name, "nan", "nan", "nan", "0"});
            continue;
        }
        w.row({qf.name, fmt17(qf.fit.slope), fmt17(qf.fit.intercept), fmt17(qf.fit.r2),
               std::to_string(qf.fit.n_points)});
    }
}

inline void write_rate_dat(const std::string& dir, const SweepReport& rep) {
    for (int q = 0; q < Q_COUNT; ++q) {
        std::string path = dir + "/rate_" + quantity_name(q) + ".dat";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw ConfigError("cannot open output file: " + path);
        for (const auto& r : rep.reports)
            if (r.value[q] > 0.0)
                std::fprintf(f, "%s %s\n", fmt17(std::log10(r.epsilon)).c_str(),
                             fmt17(std::log10(r.value[q])).c_str());
        std::fclose(f);
    }
}

inline void write_weighted_csv(const std::string& path, const WeightedReport& rep) {
    CsvWriter w(path);
    w.row({"side", "quantity", "l", "i", "norm_kind", "value"});
    for (const auto& en : rep.entries)
        w.row({side_name(en.side), en.quantity, std::to_string(en.l), std::to_string(en.i),
               en.norm_kind, fmt17(en.value)});
}

}  // namespace layerlab
