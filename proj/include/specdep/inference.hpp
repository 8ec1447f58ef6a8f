#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specdep/measures.hpp"

namespace specdep {

enum class Component { total, lagged, instantaneous };
enum class DfScope { blocks, all_univariate };

/// Scale applied to a measure to form the chi-square statistic.
enum class Scale {
  paper_nt,          ///< N_T, the classical asymptotic statement
  segments_nr,       ///< N_R
  calibrated_2nrm1,  ///< 2 (N_R - 1), exact for the univariate total null
};

const char* to_string(Component c);
const char* to_string(Scale s);
Scale parse_scale(const std::string& text);

/// blocks: total -> 2 sum_{i<j} p_i p_j, lagged/instantaneous -> sum_{i<j} p_i p_j.
/// all_univariate (single p): total -> p(p-1), lagged/instantaneous -> p(p-1)/2.
int degrees_of_freedom(std::span<const std::size_t> dims, Component c, DfScope scope);

/// Upper-tail probability of chi-square(df) at x.
double chi_square_sf(double x, int df);

double scale_value(Scale scale, std::size_t n_t, std::size_t n_r);

struct TestResult {
  Component measure = Component::total;
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  Scale scale_used = Scale::calibrated_2nrm1;
  double scale_value = 0.0;
  std::vector<std::string> flags;
};

/// Chi-square tests of zero total, lagged and instantaneous dependence, in
/// that order. Linear reports only; nonlinear reports raise NormModeError.
std::array<TestResult, 3> test_dependence(const DependenceReport& report, std::size_t n_t,
                                          std::size_t n_r, Scale scale);

}  // namespace specdep
