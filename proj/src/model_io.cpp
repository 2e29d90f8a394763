#include "fwi/model_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "binary file formats assume a little-endian host");

namespace fwi {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("bad numeric value for " + what + ": '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok, const std::string& what) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("bad integer value for " + what + ": '" + tok + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// header fields are key=value tokens
std::string header_field(const std::vector<std::string>& toks, const std::string& key) {
    const std::string prefix = key + "=";
    for (const auto& t : toks)
        if (t.rfind(prefix, 0) == 0) return t.substr(prefix.size());
    throw ParseError("model header: missing field '" + key + "'");
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("failed renaming " + tmp.string() + " to " + path.string());
}

SlownessModel ModelFile::to_slowness() const {
    SlownessModel m;
    m.s.resize(values.size());
    if (kind == ModelKind::slowness_sq) {
        m.s = values;
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            m.s[i] = 1.0 / (values[i] * values[i]);
    }
    m.validate(grid);
    return m;
}

double ModelFile::mean_velocity() const {
    double acc = 0.0;
    for (double v : values)
        acc += (kind == ModelKind::velocity_mps) ? v : 1.0 / std::sqrt(v);
    return acc / static_cast<double>(values.size());
}

ModelFile read_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw ParseError("model header: empty file");
    const auto toks = split_ws(header);
    if (toks.empty() || toks[0] != "fwi-model")
        throw ParseError("model header: missing 'fwi-model' magic");

    ModelFile m;
    const int nx = parse_int(header_field(toks, "nx"), "nx");
    const int nz = parse_int(header_field(toks, "nz"), "nz");
    const double h = parse_double(header_field(toks, "h"), "h");
    const int n_pml = parse_int(header_field(toks, "n_pml"), "n_pml");
    const std::string kind = header_field(toks, "kind");
    if (kind == "velocity_mps")
        m.kind = ModelKind::velocity_mps;
    else if (kind == "slowness_sq")
        m.kind = ModelKind::slowness_sq;
    else
        throw ParseError("model header: bad field 'kind': '" + kind + "'");
    m.grid = build_grid(nx, nz, h, n_pml);

    const std::size_t count = static_cast<std::size_t>(nx) * nz;
    m.values.resize(count);
    in.read(reinterpret_cast<char*>(m.values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got != count * sizeof(double))
        throw ParseError("model payload: expected " + std::to_string(count * sizeof(double)) +
                         " bytes, found " + std::to_string(got));
    if (in.peek() != EOF)
        throw ParseError("model payload: trailing bytes beyond declared length");
    for (double v : m.values)
        if (!std::isfinite(v) || !(v > 0.0))
            throw ParseError("model payload: values must be finite and positive");
    return m;
}

void write_model(const fs::path& path, const ModelFile& m) {
    std::string content = "fwi-model nx=" + std::to_string(m.grid.nx) +
                          " nz=" + std::to_string(m.grid.nz) + " h=" + format_double(m.grid.h) +
                          " n_pml=" + std::to_string(m.grid.n_pml) + " kind=" +
                          (m.kind == ModelKind::velocity_mps ? "velocity_mps" : "slowness_sq") +
                          "\n";
    if (static_cast<int>(m.values.size()) != m.grid.num_nodes())
        throw std::invalid_argument("write_model: value count does not match grid");
    const std::size_t off = content.size();
    content.resize(off + m.values.size() * sizeof(double));
    std::memcpy(content.data() + off, m.values.data(), m.values.size() * sizeof(double));
    atomic_write(path, content);
}

Survey read_survey(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open survey file " + path.string());
    Survey s;
    std::string line;
    int lineno = 0;
    bool have_magic = false;
    auto fail = [&](const std::string& msg) {
        throw ParseError("survey line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!have_magic) {
            if (toks[0] != "fwi-survey") fail("missing 'fwi-survey' magic");
            have_magic = true;
            continue;
        }
        if (toks[0] == "frequencies_hz") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                s.frequencies_hz.push_back(parse_double(toks[i], "frequency"));
        } else if (toks[0] == "weight_mode") {
            if (toks.size() != 2) fail("weight_mode takes one value");
            if (toks[1] == "identity")
                s.weight_mode = WeightMode::identity;
            else if (toks[1] == "offset")
                s.weight_mode = WeightMode::offset;
            else
                fail("unknown weight_mode '" + toks[1] + "'");
        } else if (toks[0] == "source") {
            if (toks.size() != 3 && toks.size() != 4) fail("source takes ix iz [amplitude]");
            Survey::Source src;
            src.ix = parse_int(toks[1], "source ix");
            src.iz = parse_int(toks[2], "source iz");
            if (toks.size() == 4) src.amplitude = parse_double(toks[3], "source amplitude");
            s.sources.push_back(src);
        } else if (toks[0] == "receivers") {
            if (s.sources.empty()) fail("receivers before any source");
            if (toks.size() % 2 == 0) fail("receivers takes ix iz pairs");
            for (std::size_t i = 1; i + 1 < toks.size(); i += 2)
                s.sources.back().receivers.emplace_back(parse_int(toks[i], "receiver ix"),
                                                        parse_int(toks[i + 1], "receiver iz"));
        } else {
            fail("unknown directive '" + toks[0] + "'");
        }
    }
    if (!have_magic) throw ParseError("survey file: missing 'fwi-survey' magic");
    if (s.frequencies_hz.empty()) throw ParseError("survey file: no frequencies configured");
    return s;
}

void write_survey(const fs::path& path, const Survey& s) {
    std::ostringstream out;
    out << "fwi-survey\n";
    out << "frequencies_hz";
    for (double f : s.frequencies_hz) out << ' ' << format_double(f);
    out << "\nweight_mode "
        << (s.weight_mode == WeightMode::identity ? "identity" : "offset") << '\n';
    for (const auto& src : s.sources) {
        out << "source " << src.ix << ' ' << src.iz << ' ' << format_double(src.amplitude)
            << '\n';
        out << "receivers";
        for (const auto& [rx, rz] : src.receivers) out << ' ' << rx << ' ' << rz;
        out << '\n';
    }
    atomic_write(path, out.str());
}

static const char* kDataHeader =
    "frequency_hz,source_index,receiver_index,node_x,node_z,real,imag";

std::vector<DataVector> read_data(const fs::path& path, const Survey& survey) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file " + path.string());
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("data line " + std::to_string(lineno) + ": " + msg);
    };
    if (!std::getline(in, line)) throw ParseError("data file: empty");
    ++lineno;
    if (line != kDataHeader) fail("unexpected CSV header");

    std::vector<DataVector> blocks(survey.frequencies_hz.size());
    const auto offsets = survey.data_offsets();
    for (auto& b : blocks) b.assign(survey.num_data(), 0.0);

    // Canonical order: frequency blocks in survey order, sources in order,
    // receivers in listed order.
    for (std::size_t fi = 0; fi < survey.frequencies_hz.size(); ++fi) {
        for (int k = 0; k < survey.num_sources(); ++k) {
            const auto& src = survey.sources[k];
            for (std::size_t j = 0; j < src.receivers.size(); ++j) {
                if (!std::getline(in, line)) {
                    ++lineno;
                    fail("unexpected end of file; data must cover every configured frequency");
                }
                ++lineno;
                std::vector<std::string> cells;
                std::stringstream ss(line);
                std::string cell;
                while (std::getline(ss, cell, ',')) cells.push_back(cell);
                if (cells.size() != 7) fail("expected 7 columns");
                const double f = parse_double(cells[0], "frequency_hz");
                if (std::abs(f - survey.frequencies_hz[fi]) >
                    1e-9 * std::max(1.0, std::abs(f)))
                    fail("rows out of canonical frequency order");
                if (parse_int(cells[1], "source_index") != k) fail("rows out of source order");
                if (parse_int(cells[2], "receiver_index") != static_cast<int>(j))
                    fail("rows out of receiver order");
                if (parse_int(cells[3], "node_x") != src.receivers[j].first ||
                    parse_int(cells[4], "node_z") != src.receivers[j].second)
                    fail("receiver node does not match survey");
                blocks[fi][offsets[k] + j] = Complex(parse_double(cells[5], "real"),
                                                     parse_double(cells[6], "imag"));
            }
        }
    }
    if (std::getline(in, line)) {
        ++lineno;
        if (!split_ws(line).empty()) fail("trailing rows beyond the configured survey");
    }
    return blocks;
}

void write_data(const fs::path& path, const Survey& survey,
                const std::vector<DataVector>& blocks) {
    if (blocks.size() != survey.frequencies_hz.size())
        throw std::invalid_argument("write_data: one block per frequency required");
    std::ostringstream out;
    out << kDataHeader << '\n';
    const auto offsets = survey.data_offsets();
    for (std::size_t fi = 0; fi < blocks.size(); ++fi) {
        if (static_cast<int>(blocks[fi].size()) != survey.num_data())
            throw std::invalid_argument("write_data: block length mismatch");
        for (int k = 0; k < survey.num_sources(); ++k) {
            const auto& src = survey.sources[k];
            for (std::size_t j = 0; j < src.receivers.size(); ++j) {
                const Complex v = blocks[fi][offsets[k] + j];
                out << format_double(survey.frequencies_hz[fi]) << ',' << k << ',' << j << ','
                    << src.receivers[j].first << ',' << src.receivers[j].second << ','
                    << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
            }
        }
    }
    atomic_write(path, out.str());
}

FwiConfig read_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    FwiConfig c;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("config line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (!split_ws(line).empty()) fail("expected 'key = value'");
            continue;
        }
        const auto keys = split_ws(line.substr(0, eq));
        const auto vals = split_ws(line.substr(eq + 1));
        if (keys.size() != 1) fail("expected a single key before '='");
        if (vals.empty()) fail("missing value");
        const std::string& key = keys[0];
        auto one = [&]() -> const std::string& {
            if (vals.size() != 1) fail("key '" + key + "' takes a single value");
            return vals[0];
        };
        if (key == "frequencies_hz") {
            c.frequencies_hz.clear();
            for (const auto& v : vals) c.frequencies_hz.push_back(parse_double(v, key));
        } else if (key == "epsilon_list") {
            c.epsilon_list.clear();
            for (const auto& v : vals) c.epsilon_list.push_back(parse_double(v, key));
        } else if (key == "epsilon_start") {
            c.epsilon_start = parse_double(one(), key);
        } else if (key == "epsilon_end") {
            c.epsilon_end = parse_double(one(), key);
        } else if (key == "solver") {
            c.solver = inner_solver_from_string(one());
        } else if (key == "max_inner") {
            c.max_inner = parse_int(one(), key);
        } else if (key == "inner_tol") {
            c.inner_tol = parse_double(one(), key);
        } else if (key == "gmres_restart") {
            c.gmres_restart = parse_int(one(), key);
        } else if (key == "ilu_level") {
            c.ilu_level = parse_int(one(), key);
        } else if (key == "ilu_diag_shift") {
            c.ilu_diag_shift = parse_double(one(), key);
        } else if (key == "drop_reg_term") {
            const std::string& v = one();
            if (v == "true")
                c.drop_reg_term = true;
            else if (v == "false")
                c.drop_reg_term = false;
            else
                fail("drop_reg_term must be true or false");
        } else if (key == "weight_mode") {
            const std::string& v = one();
            if (v == "identity")
                c.weight_mode = WeightMode::identity;
            else if (v == "offset")
                c.weight_mode = WeightMode::offset;
            else
                fail("unknown weight_mode '" + v + "'");
        } else if (key == "v_min") {
            c.v_min = parse_double(one(), key);
        } else if (key == "v_max") {
            c.v_max = parse_double(one(), key);
        } else if (key == "ecg_stride") {
            c.ecg_stride = parse_int(one(), key);
        } else if (key == "ecg_stop_tol") {
            c.ecg_stop_tol = parse_double(one(), key);
        } else if (key == "pml_power") {
            c.pml_power = parse_double(one(), key);
        } else if (key == "pml_c_ref") {
            c.pml_c_ref = parse_double(one(), key);
        } else if (key == "pml_sigma_max") {
            c.pml_sigma_max = parse_double(one(), key);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    return c;
}

namespace {

struct Rgb {
    double r, g, b;
};

// Fixed diverging colormap, low -> high: deep blue, light blue, off-white,
// orange, dark red.
Rgb colormap(double t) {
    static const Rgb stops[5] = {
        {0, 0, 96}, {32, 96, 255}, {245, 245, 245}, {255, 128, 32}, {128, 16, 16}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    return {stops[i].r + f * (stops[i + 1].r - stops[i].r),
            stops[i].g + f * (stops[i + 1].g - stops[i].g),
            stops[i].b + f * (stops[i + 1].b - stops[i].b)};
}

}  // namespace

void write_heatmap(const fs::path& ppm_path, const Grid2D& grid,
                   const RealVector& node_values) {
    if (static_cast<int>(node_values.size()) != grid.num_nodes())
        throw std::invalid_argument("write_heatmap: value count does not match grid");
    const int w = grid.core_nx();
    const int hgt = grid.core_nz();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int iz = grid.n_pml; iz < grid.nz - grid.n_pml; ++iz) {
        for (int ix = grid.n_pml; ix < grid.nx - grid.n_pml; ++ix) {
            const double v = node_values[grid.index(ix, iz)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    std::string content = "P6\n" + std::to_string(w) + " " + std::to_string(hgt) + "\n255\n";
    content.reserve(content.size() + static_cast<std::size_t>(w) * hgt * 3);
    const double span = hi > lo ? hi - lo : 1.0;
    for (int iz = grid.n_pml; iz < grid.nz - grid.n_pml; ++iz) {
        for (int ix = grid.n_pml; ix < grid.nx - grid.n_pml; ++ix) {
            const double t = (node_values[grid.index(ix, iz)] - lo) / span;
            const Rgb c = colormap(t);
            content.push_back(static_cast<char>(static_cast<unsigned char>(c.r + 0.5)));
            content.push_back(static_cast<char>(static_cast<unsigned char>(c.g + 0.5)));
            content.push_back(static_cast<char>(static_cast<unsigned char>(c.b + 0.5)));
        }
    }
    atomic_write(ppm_path, content);
    fs::path sidecar = ppm_path;
    sidecar.replace_extension(".txt");
    atomic_write(sidecar, "min " + format_double(lo) + "\nmax " + format_double(hi) + "\n");
}

ModelFile make_layered_model(const Grid2D& grid, const std::vector<double>& velocities,
                             const std::vector<int>& interfaces) {
    if (velocities.empty())
        throw std::invalid_argument("make_layered_model: need at least one layer");
    if (interfaces.size() + 1 != velocities.size())
        throw std::invalid_argument(
            "make_layered_model: need one interface fewer than layers");
    for (std::size_t i = 0; i < interfaces.size(); ++i) {
        if (interfaces[i] <= 0 || interfaces[i] >= grid.nz)
            throw std::invalid_argument("make_layered_model: interface outside the grid");
        if (i > 0 && interfaces[i] <= interfaces[i - 1])
            throw std::invalid_argument("make_layered_model: interfaces must ascend");
    }
    for (double v : velocities)
        if (!(v > 0.0)) throw std::invalid_argument("make_layered_model: velocities must be positive");
    ModelFile m;
    m.grid = grid;
    m.kind = ModelKind::velocity_mps;
    m.values.resize(grid.num_nodes());
    for (int iz = 0; iz < grid.nz; ++iz) {
        std::size_t layer = 0;
        while (layer < interfaces.size() && iz >= interfaces[layer]) ++layer;
        for (int ix = 0; ix < grid.nx; ++ix)
            m.values[grid.index(ix, iz)] = velocities[layer];
    }
    return m;
}

ModelFile make_lens_model(const Grid2D& grid, double background_mps, double amplitude_mps,
                          double center_ix, double center_iz, double radius_nodes) {
    if (!(background_mps > 0.0))
        throw std::invalid_argument("make_lens_model: background must be positive");
    if (!(radius_nodes > 0.0))
        throw std::invalid_argument("make_lens_model: radius must be positive");
    ModelFile m;
    m.grid = grid;
    m.kind = ModelKind::velocity_mps;
    m.values.resize(grid.num_nodes());
    const double two_r2 = 2.0 * radius_nodes * radius_nodes;
    for (int iz = 0; iz < grid.nz; ++iz) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double dx = ix - center_ix, dz = iz - center_iz;
            const double v =
                background_mps + amplitude_mps * std::exp(-(dx * dx + dz * dz) / two_r2);
            if (!(v > 0.0))
                throw std::invalid_argument("make_lens_model: non-positive velocity produced");
            m.values[grid.index(ix, iz)] = v;
        }
    }
    return m;
}

ModelFile import_raw_model(const Grid2D& grid, const fs::path& raw_path, ModelKind out_kind) {
    std::ifstream in(raw_path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open raw model " + raw_path.string());
    const std::size_t bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t expected = static_cast<std::size_t>(grid.num_nodes()) * sizeof(float);
    if (bytes != expected)
        throw ParseError("raw model: expected " + std::to_string(expected) + " bytes (" +
                         std::to_string(grid.num_nodes()) + " float32 values), found " +
                         std::to_string(bytes));
    in.seekg(0);
    std::vector<float> raw(grid.num_nodes());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("failed reading " + raw_path.string());
    ModelFile m;
    m.grid = grid;
    m.kind = out_kind;
    m.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = raw[i];
        if (!(v > 0.0) || !std::isfinite(v))
            throw ParseError("raw model: velocities must be finite and positive");
        m.values[i] = (out_kind == ModelKind::velocity_mps) ? v : 1.0 / (v * v);
    }
    return m;
}

}  // namespace fwi
