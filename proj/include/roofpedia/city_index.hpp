#pragma once

#include "roofpedia/tagging.hpp"
#include "roofpedia/typology.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace roofpedia::index {

using tagging::CitySummary;

/// Penetration of one typology in one city, percentages at full precision.
struct CityPenetration {
    std::string city;
    Typology typology = Typology::Green;
    std::int64_t buildings = 0;
    std::int64_t tagged = 0;
    double total_area_m2 = 0.0;
    double tagged_area_m2 = 0.0;
    double pct_count = 0.0;
    double pct_area = 0.0;
};

/// %Count = 100 * tagged / buildings, %Area = 100 * tagged area / total area.
/// DomainError when the city has no buildings, no area, or the typology was not processed.
CityPenetration city_penetration(const CitySummary& city, Typology typology);

struct NormalizedScore {
    double by_count = 0.0;
    double by_area = 0.0;
};

struct Normalization {
    std::vector<NormalizedScore> scores; // parallel to the input
    std::vector<std::string> warnings;
};

/// Min-max normalization to [0, 100] over exactly the supplied cities, count and area
/// independently. Needs at least two cities; a column with max == min scores 0 with a warning.
Normalization normalize_scores(std::span<const CityPenetration> pens);

/// Mean of the two normalized scores (Solar Score / Green Score).
double typology_score(double score_by_count, double score_by_area);

/// Mean of the Solar and Green scores.
double overall_score(double solar, double green);

/// Presentation rounding to an integer, halves rounded up.
std::int64_t present(double value);

struct CityIndexRow {
    int rank = 0;
    CityPenetration penetration;
    double score_by_count = 0.0;
    double score_by_area = 0.0;
    double typology_score = 0.0;
};

struct OverallRow {
    int rank = 0;
    std::string city;
    double solar_score = 0.0;
    double green_score = 0.0;
    double overall_score = 0.0;
};

struct IndexTables {
    std::vector<CityIndexRow> green;
    std::vector<CityIndexRow> solar;
    std::vector<OverallRow> overall;
    std::vector<std::string> excluded_from_overall;
    std::vector<std::string> warnings;
};

/// Ranks by typology score (ties: %Area descending, then name); the overall table holds
/// only cities present in both typology tables and averages their presented typology scores.
IndexTables build_index_tables(std::span<const CitySummary> cities);

/// Orders rows and assigns 1-based ranks.
void rank_rows(std::vector<CityIndexRow>& rows);
void rank_rows(std::vector<OverallRow>& rows);

std::string typology_table_csv(const std::vector<CityIndexRow>& rows, Typology typology);
std::string overall_table_csv(const std::vector<OverallRow>& rows);
nlohmann::json tables_to_json(const IndexTables& tables);

} // namespace roofpedia::index
