#include "pctate/csv.hpp"

#include <fstream>
#include <sstream>

namespace pctate {

namespace {

std::vector<std::string> parse_line(const std::string& line, const std::string& origin, long lineno) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (quoted)
        throw ParseError(origin + ":" + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

double parse_number(const std::string& text, const std::string& what, long row) {
    try {
        size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse " + what + " value '" + text + "'");
    }
}

long parse_integer(const std::string& text, const std::string& what, long row) {
    try {
        size_t pos = 0;
        const long value = std::stol(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse " + what + " value '" + text + "'");
    }
}

}  // namespace

int CsvTable::column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<int>(j);
    throw SchemaError("missing column '" + name + "'");
}

CsvTable parse_csv(std::istream& in, const std::string& origin) {
    CsvTable table;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.peek() == EOF) break;
        auto fields = parse_line(line, origin, lineno);
        if (lineno == 1) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw ParseError(origin + ": missing header row");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_csv(in, path);
}

CrossSectionData load_cross_section(const CsvTable& table, const EstimateMapping& mapping) {
    const int outcome_col = table.column(mapping.outcome);
    const int subgroup_col = table.column(mapping.subgroup);
    std::vector<int> covariate_cols;
    for (const auto& name : mapping.covariates) covariate_cols.push_back(table.column(name));
    const int cluster_col = mapping.cluster.empty() ? -1 : table.column(mapping.cluster);

    const long n = static_cast<long>(table.rows.size());
    if (n == 0) throw EmptyInput("no data rows");

    CrossSectionData data;
    data.covariate_names = mapping.covariates;
    data.covariates.resize(n, static_cast<long>(covariate_cols.size()));
    data.outcome.resize(n);
    data.subgroup.resize(n);
    if (cluster_col >= 0) data.cluster_ids.resize(n);

    std::vector<long> bad_rows;
    for (long i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const long lineno = i + 2;  // header is line 1
        data.outcome[i] = parse_number(row[outcome_col], mapping.outcome, lineno);
        if (!(data.outcome[i] > 0.0)) bad_rows.push_back(lineno);
        data.subgroup[i] = row[subgroup_col];
        for (size_t j = 0; j < covariate_cols.size(); ++j)
            data.covariates(i, j) = parse_number(row[covariate_cols[j]], mapping.covariates[j], lineno);
        if (cluster_col >= 0)
            data.cluster_ids[i] = parse_integer(row[cluster_col], mapping.cluster, lineno);
    }
    if (!bad_rows.empty()) {
        std::ostringstream msg;
        msg << "nonpositive outcome at rows";
        for (long r : bad_rows) msg << " " << r;
        throw NonPositiveOutcome(msg.str());
    }
    return data;
}

PanelData load_panel(const CsvTable& table, const PanelMapping& mapping) {
    const int unit_col = table.column(mapping.unit);
    const int time_col = table.column(mapping.time);
    const int cohort_col = table.column(mapping.cohort);
    const int outcome_col = table.column(mapping.outcome);
    std::vector<int> covariate_cols;
    for (const auto& name : mapping.covariates) covariate_cols.push_back(table.column(name));

    const long n = static_cast<long>(table.rows.size());
    if (n == 0) throw EmptyInput("no data rows");

    PanelData panel;
    panel.covariate_names = mapping.covariates;
    panel.unit_id.resize(n);
    panel.time.resize(n);
    panel.cohort.resize(n);
    panel.outcome.resize(n);
    panel.covariates.resize(n, static_cast<long>(covariate_cols.size()));

    std::vector<long> bad_rows;
    for (long i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const long lineno = i + 2;
        panel.unit_id[i] = parse_integer(row[unit_col], mapping.unit, lineno);
        panel.time[i] = parse_integer(row[time_col], mapping.time, lineno);
        const std::string& cohort = row[cohort_col];
        panel.cohort[i] = (cohort.empty() || cohort == "never" || cohort == "inf")
                              ? kNeverTreated
                              : parse_integer(cohort, mapping.cohort, lineno);
        panel.outcome[i] = parse_number(row[outcome_col], mapping.outcome, lineno);
        if (!(panel.outcome[i] > 0.0)) bad_rows.push_back(lineno);
        for (size_t j = 0; j < covariate_cols.size(); ++j)
            panel.covariates(i, j) = parse_number(row[covariate_cols[j]], mapping.covariates[j], lineno);
    }
    if (!bad_rows.empty()) {
        std::ostringstream msg;
        msg << "nonpositive outcome at rows";
        for (long r : bad_rows) msg << " " << r;
        throw NonPositiveOutcome(msg.str());
    }
    return panel;
}

}  // namespace pctate
