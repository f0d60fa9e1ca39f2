#pragma once

#include "ambistop/common.hpp"

#include <set>
#include <string>
#include <vector>

namespace ambistop {

// Long-format results row. The on-disk schema is
//   experiment,param_name,param_value,quantity,value
// UTF-8, LF line endings, '.' decimal separator, 17 significant digits.
struct ResultRow {
    std::string experiment;
    std::string param_name;
    double param_value = 0.0;
    std::string quantity;
    double value = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;

    void add(std::string experiment, std::string param_name, double param_value,
             std::string quantity, double value) {
        rows.push_back({std::move(experiment), std::move(param_name), param_value,
                        std::move(quantity), value});
    }
    void append(const ResultTable& other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    }
};

// Writes <experiment>.csv per experiment under dir, plus <experiment>.svg
// (hand-built polyline chart) for experiments listed in svg_experiments that
// have at least one data row. Experiments named in ensure_experiments are
// materialized as header-only CSVs even with no rows (an empty sweep still
// leaves a file, but never an SVG). Output bytes depend only on the table.
std::vector<std::string> emit_results(const ResultTable& table, const std::string& dir,
                                      const std::set<std::string>& svg_experiments = {},
                                      const std::set<std::string>& ensure_experiments = {});

// Reads back a results CSV written by emit_results.
ResultTable load_results(const std::string& path);

// Parsed contents of a scenario pack CSV with schema
//   scenario,t,factor_index,mu,signal_mu
// one row per (scenario, step, factor); factor_index is 0-based; signal_mu
// repeats across the factor rows of one (scenario, step).
struct ScenarioPack {
    std::vector<std::string> labels;
    std::vector<Matrix> mu_paths;  // per scenario, (T+1) x K
    Matrix signal_means;           // N x (T+1)
    int horizon_T = 0;
    int n_factors = 0;
};

ScenarioPack load_scenarios(const std::string& path);

void write_scenarios(const ScenarioPack& pack, const std::string& path);

// 17-significant-digit formatting used across all emitted files; enough to
// round-trip any double exactly.
std::string format_double(double v);

}  // namespace ambistop
