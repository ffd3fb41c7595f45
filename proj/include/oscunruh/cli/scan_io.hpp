// scan_io.hpp
// Sideband scan files.
//
//   # scan branch=<red|blue> eta=<real> omega0_over_2pi_khz=<real>
//   time_us,p_g,shots
//   <time_us>,<p_g>,<shots>
//   ...
//
// shots is 0 for noiseless points. Blank lines and further '#' lines are ignored.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "oscunruh/model.hpp"
#include "oscunruh/tomography.hpp"

namespace oscunruh::cli {

inline std::string format_scan(const SidebandScan& scan) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "# scan branch=%s eta=%.17g omega0_over_2pi_khz=%.17g\n",
                  to_string(scan.branch).c_str(), scan.eta, scan.omega0 / (two_pi * 1e3));
    out += buf;
    out += "time_us,p_g,shots\n";
    for (std::size_t i = 0; i < scan.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%d\n", scan.times[i] / 1e-6, scan.p_g[i],
                      scan.shots.empty() ? 0 : scan.shots[i]);
        out += buf;
    }
    return out;
}

inline SidebandScan parse_scan(const std::string& text, const std::string& source = "scan") {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw InvalidArgument(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    SidebandScan scan;
    bool header = false, columns = false, any_shots = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header || line.rfind("# scan ", 0) != 0) continue;
            std::istringstream fields(line.substr(7));
            std::string field;
            bool has_branch = false, has_eta = false, has_omega = false;
            while (fields >> field) {
                const auto eq = field.find('=');
                if (eq == std::string::npos) fail("malformed header field '" + field + "'");
                const auto key = field.substr(0, eq), value = field.substr(eq + 1);
                try {
                    if (key == "branch") {
                        if (value == "red")
                            scan.branch = Sideband::Red;
                        else if (value == "blue")
                            scan.branch = Sideband::Blue;
                        else
                            fail("branch must be red or blue");
                        has_branch = true;
                    } else if (key == "eta") {
                        scan.eta = std::stod(value);
                        has_eta = true;
                    } else if (key == "omega0_over_2pi_khz") {
                        scan.omega0 = std::stod(value) * two_pi * 1e3;
                        has_omega = true;
                    } else {
                        fail("unknown header field '" + key + "'");
                    }
                } catch (const std::logic_error&) {
                    fail("cannot parse header value '" + value + "'");
                }
            }
            if (!(has_branch && has_eta && has_omega)) fail("header needs branch, eta and omega0_over_2pi_khz");
            header = true;
            continue;
        }
        if (!header) fail("missing '# scan' header line");
        if (!columns) {
            if (line != "time_us,p_g,shots") fail("expected column line 'time_us,p_g,shots'");
            columns = true;
            continue;
        }
        double t = 0.0, p = 0.0;
        int shots = 0;
        char trailing = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d%c", &t, &p, &shots, &trailing) != 3)
            fail("expected 'time_us,p_g,shots'");
        scan.times.push_back(t * 1e-6);
        scan.p_g.push_back(p);
        scan.shots.push_back(shots);
        any_shots = any_shots || shots > 0;
    }
    if (!header) fail("missing '# scan' header line");
    if (scan.times.empty()) fail("scan has no data rows");
    if (!any_shots) scan.shots.clear();
    try {
        scan.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(source + ": " + e.what());
    }
    return scan;
}

inline SidebandScan read_scan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scan file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scan(buf.str(), path);
}

}  // namespace oscunruh::cli
