#include "roofpedia/city_index.hpp"

#include "roofpedia/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace roofpedia::index {

using nlohmann::json;

CityPenetration city_penetration(const CitySummary& city, Typology typology) {
    const auto& totals = city.totals(typology);
    if (!totals)
        throw DomainError("city '" + city.city + "' has no " + std::string(to_string(typology)) + " results");
    if (city.buildings <= 0)
        throw DomainError("city '" + city.city + "' has zero buildings");
    if (!(city.total_area_m2 > 0.0))
        throw DomainError("city '" + city.city + "' has zero footprint area");
    CityPenetration p;
    p.city = city.city;
    p.typology = typology;
    p.buildings = city.buildings;
    p.tagged = totals->count;
    p.total_area_m2 = city.total_area_m2;
    p.tagged_area_m2 = totals->area_m2;
    p.pct_count = 100.0 * static_cast<double>(p.tagged) / static_cast<double>(p.buildings);
    p.pct_area = 100.0 * p.tagged_area_m2 / p.total_area_m2;
    return p;
}

Normalization normalize_scores(std::span<const CityPenetration> pens) {
    if (pens.size() < 2)
        throw DomainError("at least 2 cities required for min-max normalization");
    auto [cmin, cmax] = std::minmax_element(pens.begin(), pens.end(),
                                            [](const auto& a, const auto& b) { return a.pct_count < b.pct_count; });
    auto [amin, amax] = std::minmax_element(pens.begin(), pens.end(),
                                            [](const auto& a, const auto& b) { return a.pct_area < b.pct_area; });
    const double lo_c = cmin->pct_count, hi_c = cmax->pct_count;
    const double lo_a = amin->pct_area, hi_a = amax->pct_area;

    Normalization out;
    if (hi_c == lo_c)
        out.warnings.push_back("degenerate normalization: every city has the same %Count; scores set to 0");
    if (hi_a == lo_a)
        out.warnings.push_back("degenerate normalization: every city has the same %Area; scores set to 0");
    out.scores.reserve(pens.size());
    for (const auto& p : pens) {
        NormalizedScore s;
        s.by_count = hi_c > lo_c ? 100.0 * (p.pct_count - lo_c) / (hi_c - lo_c) : 0.0;
        s.by_area = hi_a > lo_a ? 100.0 * (p.pct_area - lo_a) / (hi_a - lo_a) : 0.0;
        out.scores.push_back(s);
    }
    return out;
}

double typology_score(double score_by_count, double score_by_area) { return (score_by_count + score_by_area) / 2.0; }

double overall_score(double solar, double green) { return (solar + green) / 2.0; }

std::int64_t present(double value) {
    // The epsilon absorbs representation error on exact halves such as 12.5.
    return static_cast<std::int64_t>(std::floor(value + 0.5 + 1e-9));
}

void rank_rows(std::vector<CityIndexRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const CityIndexRow& a, const CityIndexRow& b) {
        if (a.typology_score != b.typology_score)
            return a.typology_score > b.typology_score;
        if (a.penetration.pct_area != b.penetration.pct_area)
            return a.penetration.pct_area > b.penetration.pct_area;
        return a.penetration.city < b.penetration.city;
    });
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].rank = static_cast<int>(i + 1);
}

void rank_rows(std::vector<OverallRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const OverallRow& a, const OverallRow& b) {
        if (a.overall_score != b.overall_score)
            return a.overall_score > b.overall_score;
        return a.city < b.city;
    });
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].rank = static_cast<int>(i + 1);
}

namespace {

std::vector<CityIndexRow> typology_table(std::span<const CitySummary> cities, Typology typology,
                                         std::vector<std::string>& warnings) {
    std::vector<CityPenetration> pens;
    for (const auto& c : cities)
        if (c.totals(typology))
            pens.push_back(city_penetration(c, typology));
    if (pens.empty())
        return {};
    const auto norm = normalize_scores(pens);
    for (const auto& w : norm.warnings)
        warnings.push_back(std::string(to_string(typology)) + ": " + w);
    std::vector<CityIndexRow> rows;
    for (std::size_t i = 0; i < pens.size(); ++i) {
        const auto& s = norm.scores[i];
        rows.push_back(CityIndexRow{0, pens[i], s.by_count, s.by_area, typology_score(s.by_count, s.by_area)});
    }
    rank_rows(rows);
    return rows;
}

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

IndexTables build_index_tables(std::span<const CitySummary> cities) {
    IndexTables t;
    {
        std::map<std::string, int> names;
        for (const auto& c : cities)
            if (++names[c.city] > 1)
                throw DomainError("city '" + c.city + "' supplied more than once");
    }
    t.green = typology_table(cities, Typology::Green, t.warnings);
    t.solar = typology_table(cities, Typology::Solar, t.warnings);

    std::map<std::string, double> green_by_city;
    for (const auto& r : t.green)
        green_by_city[r.penetration.city] = r.typology_score;
    for (const auto& r : t.solar) {
        auto it = green_by_city.find(r.penetration.city);
        if (it == green_by_city.end()) {
            t.excluded_from_overall.push_back(r.penetration.city);
            continue;
        }
        // The overall score averages the presented (integer) typology scores.
        const auto solar = static_cast<double>(present(r.typology_score));
        const auto green = static_cast<double>(present(it->second));
        t.overall.push_back(OverallRow{0, r.penetration.city, solar, green, overall_score(solar, green)});
        green_by_city.erase(it);
    }
    for (const auto& [city, score] : green_by_city)
        t.excluded_from_overall.push_back(city);
    std::sort(t.excluded_from_overall.begin(), t.excluded_from_overall.end());
    for (const auto& city : t.excluded_from_overall)
        t.warnings.push_back("city '" + city + "' lacks one typology and is excluded from the overall ranking");
    rank_rows(t.overall);
    return t;
}

std::string typology_table_csv(const std::vector<CityIndexRow>& rows, Typology typology) {
    const std::string name = typology == Typology::Green ? "Green" : "Solar";
    std::ostringstream out;
    out << "Rank,City,Bldg.," << name << " Roofs,%Count,%Area,Score by Count,Score by Area," << name << " Score\n";
    for (const auto& r : rows) {
        out << r.rank << ',' << csv_field(r.penetration.city) << ',' << r.penetration.buildings << ','
            << r.penetration.tagged << ',' << fixed(r.penetration.pct_count, 1) << ','
            << fixed(r.penetration.pct_area, 1) << ',' << present(r.score_by_count) << ','
            << present(r.score_by_area) << ',' << present(r.typology_score) << '\n';
    }
    return out.str();
}

std::string overall_table_csv(const std::vector<OverallRow>& rows) {
    std::ostringstream out;
    out << "Rank,City,Solar Score,Green Score,Overall Score\n";
    for (const auto& r : rows)
        out << r.rank << ',' << csv_field(r.city) << ',' << present(r.solar_score) << ',' << present(r.green_score)
            << ',' << present(r.overall_score) << '\n';
    return out.str();
}

json tables_to_json(const IndexTables& tables) {
    auto typology_rows = [](const std::vector<CityIndexRow>& rows) {
        json out = json::array();
        for (const auto& r : rows)
            out.push_back(json{{"rank", r.rank},
                               {"city", r.penetration.city},
                               {"buildings", r.penetration.buildings},
                               {"tagged", r.penetration.tagged},
                               {"total_area_m2", r.penetration.total_area_m2},
                               {"tagged_area_m2", r.penetration.tagged_area_m2},
                               {"pct_count", r.penetration.pct_count},
                               {"pct_area", r.penetration.pct_area},
                               {"score_by_count", r.score_by_count},
                               {"score_by_area", r.score_by_area},
                               {"score", r.typology_score}});
        return out;
    };
    json overall = json::array();
    for (const auto& r : tables.overall)
        overall.push_back(json{{"rank", r.rank},
                               {"city", r.city},
                               {"solar_score", r.solar_score},
                               {"green_score", r.green_score},
                               {"overall_score", r.overall_score}});
    return json{{"green", typology_rows(tables.green)},
                {"solar", typology_rows(tables.solar)},
                {"overall", std::move(overall)},
                {"excluded_from_overall", tables.excluded_from_overall},
                {"warnings", tables.warnings}};
}

} // namespace roofpedia::index
