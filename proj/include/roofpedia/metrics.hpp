#pragma once

#include "roofpedia/tagging.hpp"
#include "roofpedia/typology.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roofpedia::metrics {

enum class Unit { Count, Area };

inline const char* to_string(Unit u) { return u == Unit::Count ? "count" : "area"; }

/// Evaluation tallies. For Unit::Count the values are whole buildings.
struct Confusion {
    Unit unit = Unit::Count;
    double total = 0.0;
    double truth = 0.0;
    double pred = 0.0; // TP + FP
    double tp = 0.0;
    double fp = 0.0;
};

/// Builds a tally from the raw table columns, checking fp = pred - tp and the bounds.
Confusion make_confusion(Unit unit, double total, double truth, double pred, double tp);

/// Joins the registries on footprint id. Count counts parent buildings once, Area sums
/// part areas taken from the predicted registry. Orphan ids throw DataError.
Confusion confusion(const tagging::CityRegistry& predicted, const tagging::CityRegistry& truth, Typology typology,
                    Unit unit);

/// 100 * TP / Truth; nullopt when Truth is 0.
std::optional<double> percent_matching(const Confusion& c);
/// 100 * FP / Total; DomainError when Total is 0.
double percent_fp(const Confusion& c);
/// 100 * TP / Total; DomainError when Total is 0.
double percent_cover(const Confusion& c);

struct EvaluationRow {
    std::string region;
    std::optional<double> area_km2;
    Confusion tally;
    std::optional<double> pct_matching;
    double pct_fp = 0.0;
    double pct_cover = 0.0;
};

struct EvaluationReport {
    Typology typology = Typology::Green;
    Unit unit = Unit::Count;
    std::vector<EvaluationRow> rows;
    /// Unweighted means over rows; rows without a %Matching are left out of that mean.
    std::optional<double> avg_matching;
    double avg_fp = 0.0;
    double avg_cover = 0.0;
    std::vector<std::string> warnings;
};

struct RegionTally {
    std::string name;
    std::optional<double> area_km2;
    Confusion tally;
};

struct RegionRegistries {
    std::string name;
    std::optional<double> area_km2;
    std::reference_wrapper<const tagging::CityRegistry> predicted;
    std::reference_wrapper<const tagging::CityRegistry> truth;
};

EvaluationReport evaluation_report(std::span<const RegionTally> regions, Typology typology, Unit unit);
EvaluationReport evaluation_report(std::span<const RegionRegistries> regions, Typology typology, Unit unit);

/// Columns: Region, Area km², Total, Truth, Pred, Matching, %Matching, %FP, %Cover, then an Average row.
std::string to_csv(const EvaluationReport& report);

} // namespace roofpedia::metrics
