#pragma once

#include <string>

#include "json.hpp"

#include "masharp/estimate.hpp"
#include "masharp/hessian.hpp"
#include "masharp/oracle.hpp"

namespace masharp {

// JSON views of the analysis results. Non-finite numbers become null.
nlohmann::json to_json(const GrowthFit& f);
nlohmann::json to_json(const ExponentCheck& c);
nlohmann::json to_json(const BandTable& t);
nlohmann::json to_json(const GrowthReport& r);
nlohmann::json to_json(const PogorelovReport& r);
nlohmann::json to_json(const IntegrabilityReport& r);
nlohmann::json to_json(const SlicingSuite& r);
nlohmann::json to_json(const DegenerateReport& r);
nlohmann::json to_json(const HadamardReport& r, const Grid& grid);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const Constants& c);

// CSV tables: a '#'-prefixed header line naming the columns, then one
// numeric row per record, numbers printed with 17 significant digits.
std::string solution_csv(const GridField& u);
std::string hessian_csv(const HessianField& H);
std::string band_table_csv(const BandTable& t);
std::string growth_fits_csv(const std::vector<ExponentCheck>& checks);
std::string integrability_csv(const IntegrabilityReport& r);
std::string integrability_beta_csv(const IntegrabilityReport& r);
std::string pogorelov_csv(const PogorelovReport& r);
std::string slicing_csv(const SlicingSuite& r);

/// Shortest decimal form used in CSV cells.
std::string format_number(double v);

}  // namespace masharp
