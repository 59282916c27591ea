#include "roofpedia/metrics.hpp"

#include "roofpedia/errors.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace roofpedia::metrics {

Confusion make_confusion(Unit unit, double total, double truth, double pred, double tp) {
    if (!(total >= 0 && truth >= 0 && pred >= 0 && tp >= 0))
        throw DomainError("confusion tallies must be non-negative");
    if (truth > total || pred > total)
        throw DomainError("truth and prediction tallies cannot exceed the total");
    if (tp > truth || tp > pred)
        throw DomainError("true positives cannot exceed truth or prediction tallies");
    return Confusion{unit, total, truth, pred, tp, pred - tp};
}

Confusion confusion(const tagging::CityRegistry& predicted, const tagging::CityRegistry& truth, Typology typology,
                    Unit unit) {
    auto label = [typology](const footprints::BuildingFootprint& fp) {
        return typology == Typology::Green ? fp.green : fp.solar;
    };
    std::map<std::string, const footprints::BuildingFootprint*> truth_by_id;
    for (const auto& fp : truth.footprints)
        truth_by_id.emplace(fp.id, &fp);

    std::vector<std::string> orphans;
    std::set<std::string> matched;
    for (const auto& fp : predicted.footprints) {
        if (truth_by_id.count(fp.id))
            matched.insert(fp.id);
        else
            orphans.push_back(fp.id + " (predicted only)");
    }
    for (const auto& fp : truth.footprints)
        if (!matched.count(fp.id))
            orphans.push_back(fp.id + " (truth only)");
    if (!orphans.empty()) {
        std::string msg = "registries do not share footprint ids; " + std::to_string(orphans.size()) + " orphan(s):";
        for (std::size_t i = 0; i < orphans.size() && i < 20; ++i)
            msg += " " + orphans[i];
        if (orphans.size() > 20)
            msg += " ...";
        throw DataError(msg);
    }

    if (unit == Unit::Area) {
        double total = 0, t = 0, p = 0, tp = 0;
        for (const auto& fp : predicted.footprints) {
            const bool is_pred = label(fp);
            const bool is_truth = label(*truth_by_id.at(fp.id));
            total += fp.area_m2;
            t += is_truth ? fp.area_m2 : 0.0;
            p += is_pred ? fp.area_m2 : 0.0;
            tp += (is_pred && is_truth) ? fp.area_m2 : 0.0;
        }
        return Confusion{unit, total, t, p, tp, p - tp};
    }

    // Count: a building is positive when any of its parts is.
    std::map<std::string, std::pair<bool, bool>> buildings;
    for (const auto& fp : predicted.footprints) {
        auto& flags = buildings[fp.parent_id];
        flags.first = flags.first || label(fp);
        flags.second = flags.second || label(*truth_by_id.at(fp.id));
    }
    Confusion c{unit, static_cast<double>(buildings.size()), 0, 0, 0, 0};
    for (const auto& [id, flags] : buildings) {
        c.pred += flags.first ? 1 : 0;
        c.truth += flags.second ? 1 : 0;
        c.tp += (flags.first && flags.second) ? 1 : 0;
    }
    c.fp = c.pred - c.tp;
    return c;
}

std::optional<double> percent_matching(const Confusion& c) {
    if (c.truth <= 0.0)
        return std::nullopt;
    return 100.0 * c.tp / c.truth;
}

double percent_fp(const Confusion& c) {
    if (c.total <= 0.0)
        throw DomainError("%FP undefined for a zero total");
    return 100.0 * c.fp / c.total;
}

double percent_cover(const Confusion& c) {
    if (c.total <= 0.0)
        throw DomainError("%Cover undefined for a zero total");
    return 100.0 * c.tp / c.total;
}

EvaluationReport evaluation_report(std::span<const RegionTally> regions, Typology typology, Unit unit) {
    if (regions.empty())
        throw DomainError("evaluation report needs at least one region");
    EvaluationReport report;
    report.typology = typology;
    report.unit = unit;
    double sum_matching = 0.0;
    std::size_t n_matching = 0;
    for (const auto& r : regions) {
        EvaluationRow row{r.name, r.area_km2, r.tally, percent_matching(r.tally), percent_fp(r.tally),
                          percent_cover(r.tally)};
        if (row.pct_matching) {
            sum_matching += *row.pct_matching;
            ++n_matching;
        } else {
            report.warnings.push_back("region '" + r.name + "' has no ground-truth positives; %Matching is N/A");
        }
        report.avg_fp += row.pct_fp;
        report.avg_cover += row.pct_cover;
        report.rows.push_back(std::move(row));
    }
    const auto n = static_cast<double>(report.rows.size());
    report.avg_fp /= n;
    report.avg_cover /= n;
    if (n_matching > 0)
        report.avg_matching = sum_matching / static_cast<double>(n_matching);
    return report;
}

EvaluationReport evaluation_report(std::span<const RegionRegistries> regions, Typology typology, Unit unit) {
    std::vector<RegionTally> tallies;
    tallies.reserve(regions.size());
    for (const auto& r : regions)
        tallies.push_back(RegionTally{r.name, r.area_km2, confusion(r.predicted.get(), r.truth.get(), typology, unit)});
    return evaluation_report(tallies, typology, unit);
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string to_csv(const EvaluationReport& report) {
    const int value_decimals = report.unit == Unit::Count ? 0 : 2;
    std::ostringstream out;
    out << "Region,Area km²,Total,Truth,Pred,Matching,%Matching,%FP,%Cover\n";
    for (const auto& row : report.rows) {
        out << csv_field(row.region) << ',' << (row.area_km2 ? fixed(*row.area_km2, 2) : "") << ','
            << fixed(row.tally.total, value_decimals) << ',' << fixed(row.tally.truth, value_decimals) << ','
            << fixed(row.tally.pred, value_decimals) << ',' << fixed(row.tally.tp, value_decimals) << ','
            << (row.pct_matching ? fixed(*row.pct_matching, 2) : "N/A") << ',' << fixed(row.pct_fp, 2) << ','
            << fixed(row.pct_cover, 2) << '\n';
    }
    out << "Average,,,,,," << (report.avg_matching ? fixed(*report.avg_matching, 2) : "N/A") << ','
        << fixed(report.avg_fp, 2) << ',' << fixed(report.avg_cover, 2) << '\n';
    return out.str();
}

} // namespace roofpedia::metrics
