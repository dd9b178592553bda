#include "biphoton/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace biphoton {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc{} || r.ptr != e)
        throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                 ": '" + text + "' is not a number");
    return v;
}

}  // namespace

std::vector<MeasuredPoint> read_measured_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

    std::vector<MeasuredPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, ',');
        if (fields.empty()) continue;
        // header detection: first field not parseable as a number
        if (points.empty()) {
            double probe;
            const auto r = std::from_chars(fields[0].data(),
                                           fields[0].data() + fields[0].size(), probe);
            if (r.ec != std::errc{}) continue;
        }
        if (fields.size() < 2)
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": expected T_C,E[,sigma]");
        MeasuredPoint p;
        p.t_celsius = parse_double(fields[0], line_no);
        p.e = parse_double(fields[1], line_no);
        if (fields.size() >= 3 && !fields[2].empty())
            p.sigma = parse_double(fields[2], line_no);
        points.push_back(p);
    }
    return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "T_C,m,E,I1,I2,Rpp,Rpm,relative_rate\n";
    out.precision(12);
    for (const SweepRow& r : rows) {
        out << r.t_celsius << ',' << r.m << ',' << r.e << ',' << r.i1 << ',' << r.i2
            << ',' << r.rpp << ',' << r.rpm << ',' << r.relative_rate;
        if (!r.note.empty()) out << " # " << r.note;
        out << '\n';
    }
}

void write_amplitude_csv(std::ostream& out, const std::vector<AmplitudeSample>& samples) {
    out << "tau_a,tau_b,re_first,im_first,re_second,im_second,re_sum,im_sum\n";
    out.precision(12);
    for (const AmplitudeSample& s : samples) {
        const auto sum = s.sum();
        out << s.tau_a << ',' << s.tau_b << ',' << s.first.real() << ','
            << s.first.imag() << ',' << s.second.real() << ',' << s.second.imag()
            << ',' << sum.real() << ',' << sum.imag() << '\n';
    }
}

}  // namespace biphoton
