/** @file verify.hpp
 *  @brief Randomized invariant suites per module, runnable from the CLI, and
 *         report-table rendering helpers.
 */
#ifndef FKIT_VERIFY_HPP
#define FKIT_VERIFY_HPP

#include <string>
#include <vector>

#include "fkit/circuit.hpp"
#include "fkit/poly.hpp"

namespace fkit {

struct CheckResult {
    std::string name;
    unsigned passed = 0;
    unsigned failed = 0;
    std::string detail; // first failure
};

struct SuiteOptions {
    FieldSpec field;        // invalid handle = suite default set
    unsigned instances = 0; // 0 = suite default
    std::uint64_t seed = 1;
};

// module in {field, poly, circuit, roots, factor, pipeline}
std::vector<CheckResult> verify_module(const std::string& module, const SuiteOptions& opts);

// least-squares slope of log(y) against log(x)
double fitted_exponent(const std::vector<std::pair<double, double>>& xy);
// fit log out_size = a log(in_size) + b log(param) + c; returns (a, b)
std::pair<double, double> fitted_exponents(const std::vector<std::array<double, 3>>& rows);

std::string render_report_table(const std::vector<TransformReport>& reports);

} // namespace fkit

#endif
