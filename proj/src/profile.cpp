#include "bilayer/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bilayer/blocks.hpp"

namespace bilayer {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw UsageError("bad number '" + s + "' in " + where);
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

}  // namespace

void write_profile_csv(std::ostream& os, const Profile& p, const std::vector<double>* lambda1,
                       const std::vector<double>* lambda2) {
    const bool with_l = lambda1 && lambda2;
    if (with_l && (lambda1->size() != p.size() || lambda2->size() != p.size()))
        throw UsageError("pressure columns do not match the profile length");
    os << (with_l ? "x,h1,h,lambda1,lambda2\n" : "x,h1,h\n");
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << format_double(p.x[i]) << ',' << format_double(p.h1[i]) << ',' << format_double(p.h[i]);
        if (with_l) os << ',' << format_double((*lambda1)[i]) << ',' << format_double((*lambda2)[i]);
        os << '\n';
    }
}

void write_profile_csv(const std::string& path, const Profile& p, const std::vector<double>* lambda1,
                       const std::vector<double>* lambda2) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_profile_csv(f, p, lambda1, lambda2);
}

Profile read_profile_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open profile " + path);
    std::string line;
    if (!std::getline(f, line)) throw UsageError("empty profile file " + path);
    const auto header = split(line);
    auto col = [&](const char* name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw UsageError(std::string("profile ") + path + " lacks column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cx = col("x"), c1 = col("h1"), ch = col("h");
    Profile p;
    int row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        const std::string where = path + ":" + std::to_string(row);
        if (cells.size() < header.size()) throw UsageError("short row at " + where);
        p.x.push_back(parse_double(cells[cx], where));
        p.h1.push_back(parse_double(cells[c1], where));
        p.h.push_back(parse_double(cells[ch], where));
    }
    if (p.size() < 2) throw UsageError("profile " + path + " needs at least two rows");
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!(p.x[i] > p.x[i - 1])) throw UsageError("profile x column must increase strictly");
    return p;
}

Profile resample(const Profile& p, int n) {
    if (n < 2 || p.size() < 2) throw UsageError("resample needs at least two nodes");
    Profile out;
    const double x0 = p.x.front(), x1 = p.x.back();
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        const double x = i == n - 1 ? x1 : x0 + (x1 - x0) * i / (n - 1);
        while (j + 2 < p.size() && p.x[j + 1] < x) ++j;
        const double w = (x - p.x[j]) / (p.x[j + 1] - p.x[j]);
        out.x.push_back(x);
        out.h1.push_back(p.h1[j] + w * (p.h1[j + 1] - p.h1[j]));
        out.h.push_back(p.h[j] + w * (p.h[j + 1] - p.h[j]));
    }
    out.resolution_warning = p.resolution_warning;
    return out;
}

}  // namespace bilayer

namespace bilayer {

void perturb_antisymmetric(Profile& p, double amplitude) {
    const double len = p.length();
    if (p.size() < 2 || !(len > 0.0)) throw UsageError("perturb_antisymmetric: profile needs a positive span");
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = amplitude * std::cos(M_PI * (p.x[i] - p.x.front()) / len);
        p.h1[i] += v;
        p.h[i] += v;
    }
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p.h1[i] > 0.0) || !(p.h[i] > 0.0)) throw UsageError("perturb_antisymmetric: amplitude breaks positivity");
}

}  // namespace bilayer
