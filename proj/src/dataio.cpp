#include "bvarfsv/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "bvarfsv/errors.hpp"

namespace bvarfsv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

bool parse_int(const std::string& s, int& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Sortable key for YYYY:Qn (fmt 1) and ISO YYYY-MM or YYYY-MM-DD (fmt 2)
// dates; a file must stick to one format.
bool date_key(const std::string& s, int& fmt, long& key) {
    if (s.size() == 7 && s[4] == ':' && (s[5] == 'Q' || s[5] == 'q')) {
        const std::string y = s.substr(0, 4);
        if (!all_digits(y) || s[6] < '1' || s[6] > '4') return false;
        fmt = 1;
        key = std::stol(y) * 4 + (s[6] - '1');
        return true;
    }
    if ((s.size() == 7 || s.size() == 10) && s[4] == '-') {
        const std::string y = s.substr(0, 4), mo = s.substr(5, 2);
        if (!all_digits(y) || !all_digits(mo)) return false;
        const long month = std::stol(mo);
        if (month < 1 || month > 12) return false;
        long day = 0;
        if (s.size() == 10) {
            if (s[7] != '-') return false;
            const std::string d = s.substr(8, 2);
            if (!all_digits(d)) return false;
            day = std::stol(d);
            if (day < 1 || day > 31) return false;
        }
        fmt = 2;
        key = (std::stol(y) * 100 + month) * 100 + day;
        return true;
    }
    return false;
}

int tcode_from_cell(const std::string& cell, const std::string& name, const std::string& where) {
    int code = 0;
    if (!parse_int(cell, code) || code < 1 || code > 7)
        throw DataError("load_panel: bad transform code for series " + name + " in " + where);
    return code;
}

} // namespace

Panel load_panel(const std::string& path, const std::string& tcode_sidecar) {
    std::ifstream in(path);
    if (!in) throw DataError("load_panel: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("load_panel: " + path + " is empty");
    const std::vector<std::string> hdr = split_csv(line);
    if (hdr.size() < 2)
        throw DataError("load_panel: " + path + " needs a date column and at least one series");

    Panel p;
    p.names.assign(hdr.begin() + 1, hdr.end());
    const std::size_t m = p.names.size();
    std::unordered_set<std::string> seen;
    for (const auto& n : p.names) {
        if (n.empty()) throw DataError("load_panel: empty series name in " + path);
        if (!seen.insert(n).second)
            throw DataError("load_panel: duplicate series name " + n + " in " + path);
    }

    long lineno = 1;
    if (tcode_sidecar.empty()) {
        if (!std::getline(in, line))
            throw DataError("load_panel: transform-code row missing in " + path);
        ++lineno;
        const std::vector<std::string> tr = split_csv(line);
        int f = 0;
        long key = 0;
        if (tr.size() != m + 1 || date_key(tr[0], f, key))
            throw DataError("load_panel: transform-code row missing in " + path);
        p.tcodes.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            p.tcodes[j] = tcode_from_cell(tr[j + 1], p.names[j], path);
    } else {
        std::ifstream side(tcode_sidecar);
        if (!side) throw DataError("load_panel: cannot open sidecar " + tcode_sidecar);
        std::unordered_map<std::string, int> codes;
        std::string sline;
        while (std::getline(side, sline)) {
            if (trim(sline).empty()) continue;
            const std::vector<std::string> cells = split_csv(sline);
            if (cells.size() != 2)
                throw DataError("load_panel: sidecar " + tcode_sidecar +
                                " lines must be name,code");
            codes[cells[0]] = tcode_from_cell(cells[1], cells[0], tcode_sidecar);
        }
        p.tcodes.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto it = codes.find(p.names[j]);
            if (it == codes.end())
                throw DataError("load_panel: no transform code for series " + p.names[j] +
                                " in " + tcode_sidecar);
            p.tcodes[j] = it->second;
        }
    }

    std::vector<std::vector<double>> rows;
    int fmt = 0;
    long prev_key = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != m + 1)
            throw DataError("load_panel: row " + std::to_string(lineno) + " of " + path + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(m + 1));
        int f = 0;
        long key = 0;
        if (!date_key(cells[0], f, key))
            throw DataError("load_panel: unrecognized date " + cells[0] + " at row " +
                            std::to_string(lineno) + " of " + path);
        if (fmt == 0) fmt = f;
        if (f != fmt)
            throw DataError("load_panel: mixed date formats at row " + std::to_string(lineno) +
                            " of " + path);
        if (!rows.empty()) {
            if (key == prev_key)
                throw DataError("load_panel: duplicate date " + cells[0] + " at row " +
                                std::to_string(lineno) + " of " + path);
            if (key < prev_key)
                throw DataError("load_panel: dates out of order at row " + std::to_string(lineno) +
                                " of " + path);
        }
        prev_key = key;
        p.dates.push_back(cells[0]);
        std::vector<double> vals(m);
        for (std::size_t j = 0; j < m; ++j) {
            if (!parse_double(cells[j + 1], vals[j]) || !std::isfinite(vals[j]))
                throw DataError("load_panel: cannot parse value at row " + std::to_string(lineno) +
                                ", column " + p.names[j] + " of " + path);
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw DataError("load_panel: no data rows in " + path);

    p.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < m; ++j)
            p.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];
    return p;
}

Eigen::Index transform_leading(int tcode) {
    switch (tcode) {
        case 1:
        case 4: return 0;
        case 2:
        case 5: return 1;
        case 3:
        case 6:
        case 7: return 2;
        default: throw ConfigError("transform_leading: code must be 1..7");
    }
}

Eigen::VectorXd apply_transform(const Eigen::VectorXd& x, int tcode, const std::string& name) {
    if (tcode < 1 || tcode > 7)
        throw ConfigError("apply_transform: code for " + name + " must be 1..7");
    const Eigen::Index n = x.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (tcode >= 4 && tcode <= 6 && !(x.array() > 0.0).all())
        throw DataError("apply_transform: nonpositive value in " + name +
                        " under a log transform");
    Eigen::VectorXd out(n);
    switch (tcode) {
        case 1: out = x; break;
        case 2:
            for (Eigen::Index t = n - 1; t >= 1; --t) out[t] = x[t] - x[t - 1];
            break;
        case 3:
            for (Eigen::Index t = n - 1; t >= 2; --t) out[t] = x[t] - 2.0 * x[t - 1] + x[t - 2];
            break;
        case 4: out = x.array().log(); break;
        case 5:
            for (Eigen::Index t = n - 1; t >= 1; --t) out[t] = std::log(x[t]) - std::log(x[t - 1]);
            break;
        case 6:
            for (Eigen::Index t = n - 1; t >= 2; --t)
                out[t] = std::log(x[t]) - 2.0 * std::log(x[t - 1]) + std::log(x[t - 2]);
            break;
        case 7: {
            for (Eigen::Index t = 1; t < n; ++t)
                if (x[t - 1] == 0.0)
                    throw DataError("apply_transform: zero level in " + name +
                                    " under the growth-rate transform");
            for (Eigen::Index t = n - 1; t >= 2; --t)
                out[t] = x[t] / x[t - 1] - x[t - 1] / x[t - 2];
            break;
        }
    }
    for (Eigen::Index t = 0; t < std::min(transform_leading(tcode), n); ++t) out[t] = nan;
    return out;
}

Panel transform_panel(const Panel& raw) {
    const Eigen::Index T0 = raw.values.rows(), m = raw.values.cols();
    if (raw.names.size() != static_cast<std::size_t>(m) ||
        raw.tcodes.size() != static_cast<std::size_t>(m) ||
        raw.dates.size() != static_cast<std::size_t>(T0))
        throw DataError("transform_panel: names, codes, and dates must match the value matrix");

    Eigen::MatrixXd v(T0, m);
    Eigen::Index lead = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        v.col(j) = apply_transform(raw.values.col(j), raw.tcodes[js], raw.names[js]);
        lead = std::max(lead, transform_leading(raw.tcodes[js]));
    }
    if (T0 - lead < 1) throw DataError("transform_panel: nothing left after trimming");

    Panel out;
    out.names = raw.names;
    out.tcodes = raw.tcodes;
    out.values = v.bottomRows(T0 - lead);
    out.dates.assign(raw.dates.begin() + lead, raw.dates.end());
    for (Eigen::Index j = 0; j < m; ++j)
        if (!out.values.col(j).allFinite())
            throw DataError("transform_panel: non-finite value in transformed series " +
                            out.names[static_cast<std::size_t>(j)]);
    return out;
}

void standardize(Panel& p) {
    const Eigen::Index T = p.values.rows(), m = p.values.cols();
    if (T < 2) throw DataError("standardize: need at least two rows");
    p.scale.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mean = p.values.col(j).mean();
        const double sd =
            std::sqrt((p.values.col(j).array() - mean).square().sum() / static_cast<double>(T));
        if (!(sd > 0.0))
            throw DataError("standardize: series " + p.names[static_cast<std::size_t>(j)] +
                            " has zero variance");
        p.values.col(j) = (p.values.col(j).array() - mean) / sd;
        p.scale[static_cast<std::size_t>(j)] = {mean, sd};
    }
}

Eigen::MatrixXd back_transform(const Eigen::MatrixXd& z, const std::vector<ScaleInfo>& scale) {
    if (scale.size() != static_cast<std::size_t>(z.cols()))
        throw DataError("back_transform: scale info does not match the column count");
    Eigen::MatrixXd out = z;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const auto& s = scale[static_cast<std::size_t>(j)];
        out.col(j) = z.col(j).array() * s.sd + s.mean;
    }
    return out;
}

void write_panel(const std::string& path, const Panel& p) {
    const Eigen::Index T = p.values.rows(), m = p.values.cols();
    if (p.names.size() != static_cast<std::size_t>(m) ||
        p.dates.size() != static_cast<std::size_t>(T))
        throw DataError("write_panel: names and dates must match the value matrix");
    std::ofstream out(path);
    if (!out) throw DataError("write_panel: cannot open " + path);
    out << "date";
    for (const auto& n : p.names) out << ',' << n;
    out << '\n';
    if (!p.tcodes.empty()) {
        if (p.tcodes.size() != static_cast<std::size_t>(m))
            throw DataError("write_panel: transform codes must match the column count");
        out << "transform";
        for (int c : p.tcodes) out << ',' << c;
        out << '\n';
    }
    char buf[40];
    for (Eigen::Index t = 0; t < T; ++t) {
        out << p.dates[static_cast<std::size_t>(t)];
        for (Eigen::Index j = 0; j < m; ++j) {
            std::snprintf(buf, sizeof buf, "%.15g", p.values(t, j));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write_panel: write to " + path + " failed");
}

} // namespace bvarfsv
