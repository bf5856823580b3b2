#include "gndirac/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gndirac/errors.hpp"

namespace gndirac {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_row(const std::string& line, std::size_t expect) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw ConfigError("csv: bad number '" + cell + "'");
        }
    }
    if (expect && out.size() != expect)
        throw ConfigError("csv: expected " + std::to_string(expect) + " columns in '" + line + "'");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    return f;
}

bool is_header(const std::string& line) {
    return !line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])) || line[0] == '_');
}

}  // namespace

void write_slice_csv(std::ostream& os, const SpinorField& s) {
    os << "# t=" << g17(s.t) << " boundary=" << (s.first_node_on_boundary ? 1 : 0)
       << " grid_first=" << s.grid_first << "\n";
    os << "x,re_u,im_u,re_v,im_v\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        os << g17(s.xs[i]) << ',' << g17(s.u[i].real()) << ',' << g17(s.u[i].imag()) << ','
           << g17(s.v[i].real()) << ',' << g17(s.v[i].imag()) << '\n';
}

void write_slice_csv(const std::string& path, const SpinorField& s) {
    auto f = open_out(path);
    write_slice_csv(f, s);
}

SpinorField read_slice_csv(std::istream& is) {
    SpinorField s;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            int b = 0;
            long g = -1;
            double t = 0.0;
            if (std::sscanf(line.c_str(), "# t=%lf boundary=%d grid_first=%ld", &t, &b, &g) == 3) {
                s.t = t;
                s.first_node_on_boundary = b != 0;
                s.grid_first = g;
            }
            continue;
        }
        if (is_header(line)) continue;
        auto r = parse_row(line, 5);
        s.xs.push_back(r[0]);
        s.u.emplace_back(r[1], r[2]);
        s.v.emplace_back(r[3], r[4]);
    }
    s.check_invariants();
    return s;
}

SpinorField read_slice_csv(const std::string& path) {
    auto f = open_in(path);
    return read_slice_csv(f);
}

void write_report_csv(std::ostream& os, const FunctionalReport& r) {
    os << "t,L_u,L_v,L0,D0,Q0,F0";
    if (r.has_difference) os << ",L1,D1,Q1,F1";
    os << '\n';
    for (std::size_t k = 0; k < r.size(); ++k) {
        os << g17(r.times[k]) << ',' << g17(r.L_u[k]) << ',' << g17(r.L_v[k]) << ',' << g17(r.L0[k])
           << ',' << g17(r.D0[k]) << ',' << g17(r.Q0[k]) << ',' << g17(r.F0[k]);
        if (r.has_difference)
            os << ',' << g17(r.L1[k]) << ',' << g17(r.D1[k]) << ',' << g17(r.Q1[k]) << ','
               << g17(r.F1[k]);
        os << '\n';
    }
}

void write_report_csv(const std::string& path, const FunctionalReport& r) {
    auto f = open_out(path);
    write_report_csv(f, r);
}

FunctionalReport read_report_csv(std::istream& is) {
    FunctionalReport r;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (is_header(line)) {
            r.has_difference = line.find("L1") != std::string::npos;
            continue;
        }
        auto v = parse_row(line, r.has_difference ? 11 : 7);
        r.times.push_back(v[0]);
        r.L_u.push_back(v[1]);
        r.L_v.push_back(v[2]);
        r.L0.push_back(v[3]);
        r.D0.push_back(v[4]);
        r.Q0.push_back(v[5]);
        r.F0.push_back(v[6]);
        if (r.has_difference) {
            r.L1.push_back(v[7]);
            r.D1.push_back(v[8]);
            r.Q1.push_back(v[9]);
            r.F1.push_back(v[10]);
        }
    }
    return r;
}

TabulatedData read_tabulated_csv(const std::string& path) {
    SpinorField s = read_slice_csv(path);
    TabulatedData d{s.xs, s.u, s.v};
    d.validate();
    return d;
}

}  // namespace gndirac
