#include "eulerlab/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eulerlab::io {

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are little-endian float64");

namespace {

using nlohmann::json;

void write_doubles(std::ofstream& out, std::span<const double> values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, size_t count) {
    std::vector<double> out(count);
    in.read(reinterpret_cast<char*>(out.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("snapshot: truncated payload");
    return out;
}

// Byte length after the header must be exactly 8 * count * field_count.
void require_eof(std::ifstream& in, const std::filesystem::path& path) {
    in.peek();
    if (!in.eof())
        throw std::runtime_error("snapshot: unexpected trailing bytes in " + path.string());
}

json read_header(std::ifstream& in, const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing header in " + path.string());
    json h = json::parse(line, nullptr, false);
    if (h.is_discarded()) throw std::runtime_error("snapshot: malformed header in " + path.string());
    if (!h.contains("schema") || h["schema"].get<int>() != 1)
        throw std::runtime_error("snapshot: unsupported schema version in " + path.string());
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
    return in;
}

}  // namespace

void write_state(const std::filesystem::path& path, const State& s) {
    const GridSpec& g = s.u1.grid();
    json h;
    h["schema"] = 1;
    h["kind"] = "state";
    h["nr"] = g.nr;
    h["nz"] = g.nz;
    h["L"] = g.length;
    h["t"] = s.t;
    h["fields"] = {"u1", "omega1", "psi1"};

    std::ofstream out = open_out(path);
    out << h.dump() << '\n';
    write_doubles(out, s.u1.values());
    write_doubles(out, s.omega1.values());
    write_doubles(out, s.psi1.values());
    if (!out) throw std::runtime_error("snapshot: write failed for " + path.string());
}

State read_state(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const json h = read_header(in, path);
    if (h.value("kind", "") != "state")
        throw std::runtime_error("snapshot: not a state file: " + path.string());
    const GridSpec g(h.at("nr").get<int>(), h.at("nz").get<int>(), h.at("L").get<double>());
    const auto fields = h.at("fields").get<std::vector<std::string>>();
    if (fields != std::vector<std::string>{"u1", "omega1", "psi1"})
        throw std::runtime_error("snapshot: unexpected field list in " + path.string());

    const size_t count = static_cast<size_t>(g.nr) * g.nz;
    State s{h.at("t").get<double>(), ScalarField2D(g), ScalarField2D(g), ScalarField2D(g)};
    for (ScalarField2D* f : {&s.u1, &s.omega1, &s.psi1}) {
        const std::vector<double> raw = read_doubles(in, count);
        std::memcpy(f->values().data(), raw.data(), count * sizeof(double));
    }
    require_eof(in, path);
    return s;
}

void write_profiles(const std::filesystem::path& path, const ProfileSet& ps) {
    json h;
    h["schema"] = 1;
    h["kind"] = "profile";

    if (const auto* fa = dynamic_cast<const FamilyAProfiles*>(&ps)) {
        h["backing"] = "analytic";
        h["family"] = "A";
        h["b"] = fa->b();
        h["c"] = fa->c();
        std::ofstream out = open_out(path);
        out << h.dump() << '\n';
        return;
    }
    if (const auto* fb = dynamic_cast<const FamilyBProfiles*>(&ps)) {
        h["backing"] = "analytic";
        h["family"] = "B";
        h["kappa"] = fb->kappa();
        h["c"] = fb->c();
        h["gamma"] = fb->gamma();
        std::ofstream out = open_out(path);
        out << h.dump() << '\n';
        return;
    }
    const auto* gp = dynamic_cast<const GridProfileSet*>(&ps);
    if (!gp)
        throw std::invalid_argument(
            "write_profiles: only analytic families and grid-backed sets are serializable");

    h["backing"] = "grid";
    h["R"] = gp->r_nodes();
    h["Z"] = gp->z_nodes();
    h["fields"] = {"U", "Omega", "Psi"};
    std::ofstream out = open_out(path);
    out << h.dump() << '\n';
    write_doubles(out, gp->swirl_values());
    write_doubles(out, gp->vorticity_values());
    write_doubles(out, gp->stream_values());
    if (!out) throw std::runtime_error("snapshot: write failed for " + path.string());
}

std::unique_ptr<ProfileSet> read_profiles(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    const json h = read_header(in, path);
    if (h.value("kind", "") != "profile")
        throw std::runtime_error("snapshot: not a profile file: " + path.string());

    const std::string backing = h.value("backing", "");
    if (backing == "analytic") {
        const std::string family = h.value("family", "");
        if (family == "A")
            return std::make_unique<FamilyAProfiles>(h.at("b").get<double>(),
                                                     h.at("c").get<double>());
        if (family == "B")
            return std::make_unique<FamilyBProfiles>(h.at("kappa").get<double>(),
                                                     h.at("c").get<double>(),
                                                     h.at("gamma").get<double>());
        throw std::runtime_error("snapshot: unknown analytic family in " + path.string());
    }
    if (backing != "grid")
        throw std::runtime_error("snapshot: unknown profile backing in " + path.string());

    auto r_nodes = h.at("R").get<std::vector<double>>();
    auto z_nodes = h.at("Z").get<std::vector<double>>();
    const size_t count = r_nodes.size() * z_nodes.size();
    std::vector<double> swirl = read_doubles(in, count);
    std::vector<double> vort = read_doubles(in, count);
    std::vector<double> stream = read_doubles(in, count);
    require_eof(in, path);
    return std::make_unique<GridProfileSet>(std::move(r_nodes), std::move(z_nodes),
                                            std::move(swirl), std::move(vort), std::move(stream));
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<StepRecord>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("diagnostics: cannot open " + path.string() + " for writing");
    out << "t,dt,max_abs_u1,max_abs_omega1,max_abs_circ,energy,r_star,z_star\n";
    char buf[256];
    for (const StepRecord& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.dt,
                      r.max_abs_u1, r.max_abs_omega1, r.max_abs_circulation, r.energy, r.r_star,
                      r.z_star);
        out << buf;
    }
    if (!out) throw std::runtime_error("diagnostics: write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

double parse_double(const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("csv: malformed numeric field '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::runtime_error("csv: malformed numeric field '" + s + "'");
    return v;
}

}  // namespace

BkmSeries read_bkm_csv(const std::filesystem::path& path, double horizon) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path.string());

    const std::vector<std::string> header = split_csv_line(line);
    int t_col = -1, sup_col = -1;
    for (size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "t") t_col = static_cast<int>(k);
        if (header[k] == "sup" || header[k] == "max_abs_omega1") sup_col = static_cast<int>(k);
    }
    if (t_col < 0 || sup_col < 0)
        throw std::runtime_error("csv: need 't' and 'sup' (or max_abs_omega1) columns in " +
                                 path.string());

    std::vector<BkmEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) <= std::max(t_col, sup_col))
            throw std::runtime_error("csv: short row in " + path.string());
        entries.push_back({parse_double(cells[t_col]), parse_double(cells[sup_col])});
    }
    return BkmSeries(std::move(entries), horizon);
}

void write_bkm_csv(const std::filesystem::path& path, const BkmSeries& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("csv: cannot open " + path.string() + " for writing");
    out << "t,sup\n";
    char buf[80];
    for (const BkmEntry& e : series.entries()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", e.t, e.sup);
        out << buf;
    }
}

namespace {

bool wildcard_match(const std::string& pattern, const std::string& text) {
    size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
    namespace fs = std::filesystem;
    const fs::path full(pattern);
    const std::string name = full.filename().string();
    if (name.find('*') == std::string::npos && name.find('?') == std::string::npos) {
        if (fs::exists(full)) return {full};
        return {};
    }
    const fs::path dir = full.parent_path().empty() ? fs::path(".") : full.parent_path();
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && wildcard_match(name, entry.path().filename().string()))
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace eulerlab::io
