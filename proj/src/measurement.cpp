#include "rdinv/measurement.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "rdinv/csv.hpp"
#include "rdinv/errors.hpp"

namespace rdinv {

namespace {

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined distributions so outputs are identical everywhere.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Measurement sample_measurement(const Trajectory& traj, MeasurementKind kind, int S,
                               double delta, std::uint64_t seed, Endpoint trace_point) {
    const Grid& g = traj.grid;
    const int axis_count = kind == MeasurementKind::FinalTime ? g.nx : g.nt;
    if (S < 4) throw std::invalid_argument("sample_measurement: S must be >= 4");
    if (S > axis_count)
        throw std::invalid_argument("sample_measurement: S exceeds the grid resolution");

    Measurement m;
    m.kind = kind;
    m.trace_point = trace_point;
    m.noise_level = delta;
    m.seed = seed;
    m.abscissae.resize(S);

    std::vector<int> idx(S);
    for (int i = 0; i < S; ++i)
        idx[i] = static_cast<int>(std::lround(static_cast<double>(i) * (axis_count - 1) /
                                              (S - 1)));

    const int j0 = trace_point == Endpoint::Left ? 0 : g.nx - 1;
    for (int s = 0; s < 2; ++s) {
        m.values[s].resize(S);
        for (int i = 0; i < S; ++i) {
            if (kind == MeasurementKind::FinalTime) {
                m.abscissae[i] = g.x(idx[i]);
                m.values[s][i] = traj.at(s, g.nt - 1, idx[i]);
            } else {
                m.abscissae[i] = g.t(idx[i]);
                m.values[s][i] = traj.at(s, idx[i], j0);
            }
        }
    }

    if (delta > 0.0) {
        std::mt19937_64 rng(seed);
        for (int s = 0; s < 2; ++s) {
            double amp = 0.0;
            for (double y : m.values[s]) amp = std::max(amp, std::abs(y));
            amp *= delta;
            for (int i = 0; i < S; ++i)
                m.values[s][i] += amp * (2.0 * unit_draw(rng) - 1.0);
        }
    }
    return m;
}

void write_measurement_csv(const Measurement& m, std::ostream& out) {
    out << "# kind," << (m.kind == MeasurementKind::FinalTime ? "final-time" : "time-trace")
        << "\n";
    out << "# S," << m.count() << "\n";
    out << "# delta," << csv_cell(m.noise_level) << "\n";
    out << "# seed," << m.seed << "\n";
    if (m.kind == MeasurementKind::TimeTrace)
        out << "# point," << (m.trace_point == Endpoint::Left ? "left" : "right") << "\n";
    out << "abscissa,u,v\n";
    for (int i = 0; i < m.count(); ++i)
        out << csv_cell(m.abscissae[i]) << ',' << csv_cell(m.values[0][i]) << ','
            << csv_cell(m.values[1][i]) << "\n";
}

Measurement read_measurement_csv(std::istream& in) {
    Measurement m;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const size_t comma = body.find(',');
            if (comma == std::string::npos) continue;
            std::string key = body.substr(0, comma);
            std::string value = body.substr(comma + 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            if (key == "kind")
                m.kind = value == "final-time" ? MeasurementKind::FinalTime
                                               : MeasurementKind::TimeTrace;
            else if (key == "delta")
                m.noise_level = std::stod(value);
            else if (key == "seed")
                m.seed = std::stoull(value);
            else if (key == "point")
                m.trace_point = value == "left" ? Endpoint::Left : Endpoint::Right;
            continue;
        }
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(row, cell, ','))
                throw ConfigError("measurement CSV: malformed row '" + line + "'");
            vals[c] = std::stod(cell);
        }
        m.abscissae.push_back(vals[0]);
        m.values[0].push_back(vals[1]);
        m.values[1].push_back(vals[2]);
    }
    if (m.count() < 4) throw ConfigError("measurement CSV: need at least 4 samples");
    for (int i = 1; i < m.count(); ++i)
        if (!(m.abscissae[i] > m.abscissae[i - 1]))
            throw ConfigError("measurement CSV: abscissae must be strictly increasing");
    return m;
}

}  // namespace rdinv
