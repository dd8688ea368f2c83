#pragma once

#include <json.hpp>

#include "repgrowth/spectral.hpp"

namespace repgrowth {

inline nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

// Machine-readable audit document for a classification run.
inline nlohmann::json report_to_json(const SpectralReport& report,
                                     const NormalizedSystem& norm) {
  nlohmann::json doc;
  doc["schema"] = "repgrowth/1";
  doc["generators"] = norm.system.alphabet().generators();
  nlohmann::json dims = nlohmann::json::object();
  for (int a = 0; a < norm.system.letters(); ++a)
    dims[norm.system.alphabet().name(a)] = norm.system.dim(a);
  doc["dims"] = dims;
  doc["alpha"] = report.alpha;
  doc["verdict"] = verdict_name(report.verdict);
  doc["justification"] = report.justification;
  doc["equivalent_to_twin"] = report.equivalent_to_twin;
  doc["multiplicity_one"] = report.multiplicity_one;
  doc["jordan_profile"] = report.jordan.block_sizes;
  doc["rank_sequence"] = report.jordan.rank_sequence;
  nlohmann::json ladders = nlohmann::json::array();
  for (const auto& ladder : report.jordan.singular_value_ladder) ladders.push_back(ladder);
  doc["singular_value_ladder"] = ladders;
  nlohmann::json cluster = nlohmann::json::array();
  for (const auto& mu : report.cluster) cluster.push_back(complex_to_json(mu));
  doc["eigenvalue_cluster"] = cluster;
  doc["k0"] = report.k0;
  doc["e0"] = report.e0 ? nlohmann::json(*report.e0) : nlohmann::json();
  doc["e0_three_term"] =
      report.e0_three_term ? nlohmann::json(*report.e0_three_term) : nlohmann::json();
  doc["lambda"] = report.lambda ? nlohmann::json(*report.lambda) : nlohmann::json();
  doc["q_residual"] = report.q_residual ? nlohmann::json(*report.q_residual) : nlohmann::json();
  doc["generalized_eigenvector_residual"] =
      report.gen_eigvec_residual ? nlohmann::json(*report.gen_eigvec_residual) : nlohmann::json();
  doc["dee_spectral_radius"] = report.dee_spectral_radius;
  doc["compatibility_residual"] = report.compat_residual;
  doc["twin_perron"] = report.twin_perron;
  doc["normalization_scale"] = norm.scale;
  nlohmann::json peripheral = nlohmann::json::array();
  for (const auto& mu : report.peripheral) peripheral.push_back(complex_to_json(mu));
  doc["peripheral_spectrum"] = peripheral;
  doc["warnings"] = report.warnings;
  if (report.equivalence_witness) {
    nlohmann::json witness = nlohmann::json::object();
    const auto& alphabet = norm.system.alphabet();
    for (int a = 0; a < alphabet.size(); ++a) {
      const Matrix& j = (*report.equivalence_witness)[static_cast<std::size_t>(a)];
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < j.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < j.cols(); ++k) row.push_back(complex_to_json(j(i, k)));
        rows.push_back(row);
      }
      witness[alphabet.name(a)] = rows;
    }
    doc["equivalence_witness"] = witness;
  } else {
    doc["equivalence_witness"] = nlohmann::json();
  }
  return doc;
}

}  // namespace repgrowth
