#include "eikjohn/io.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace eikjohn {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

// Payload path: header path with its extension replaced by ".bin"; the header
// stores only the basename so the pair can be moved together.
static std::string payload_path(const std::string& json_path) {
    auto dot = json_path.find_last_of('.');
    return (dot == std::string::npos ? json_path : json_path.substr(0, dot)) + ".bin";
}

static std::string basename_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

static json header_for(const GridSpec& g, const char* dtype, const std::string& bin_name) {
    json j;
    j["dim"] = g.dim;
    j["shape"] = g.dim == 2 ? json::array({g.shape[0], g.shape[1]})
                            : json::array({g.shape[0], g.shape[1], g.shape[2]});
    j["h"] = g.h;
    j["origin"] = g.dim == 2 ? json::array({g.origin[0], g.origin[1]})
                             : json::array({g.origin[0], g.origin[1], g.origin[2]});
    j["dtype"] = dtype;
    j["data"] = bin_name;
    return j;
}

static GridSpec spec_from_header(const json& j) {
    GridSpec g;
    g.dim = j.at("dim").get<int>();
    auto sh = j.at("shape");
    auto orig = j.at("origin");
    if (int(sh.size()) != g.dim || int(orig.size()) != g.dim)
        throw ConfigError("field header: shape/origin size does not match dim");
    for (int a = 0; a < g.dim; ++a) {
        g.shape[std::size_t(a)] = sh[std::size_t(a)].get<cell_t>();
        g.origin[std::size_t(a)] = orig[std::size_t(a)].get<double>();
    }
    if (g.dim == 2) g.shape[2] = 1;
    g.h = j.at("h").get<double>();
    g.validate();
    return g;
}

static void write_raw(const std::string& path, const void* data, std::size_t bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out.write(static_cast<const char*>(data), std::streamsize(bytes));
    if (!out) throw ConfigError("short write: " + path);
}

static void read_raw(const std::string& path, void* data, std::size_t bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    in.read(static_cast<char*>(data), std::streamsize(bytes));
    if (in.gcount() != std::streamsize(bytes)) throw ConfigError("payload size mismatch: " + path);
    char extra;
    if (in.read(&extra, 1)) throw ConfigError("payload larger than header implies: " + path);
}

static std::string resolve_payload(const std::string& json_path, const std::string& data_name) {
    auto slash = json_path.find_last_of('/');
    return slash == std::string::npos ? data_name : json_path.substr(0, slash + 1) + data_name;
}

void save_field(const GridField& f, const std::string& json_path) {
    f.spec.validate();
    std::string bin = payload_path(json_path);
    json j = header_for(f.spec, "f64", basename_of(bin));
    write_text_file(json_path, j.dump(2) + "\n");
    write_raw(bin, f.v.data(), f.v.size() * sizeof(double));
}

GridField load_field(const std::string& json_path) {
    json j = json::parse(read_text_file(json_path));
    if (j.at("dtype").get<std::string>() != "f64") throw ConfigError("expected dtype f64: " + json_path);
    GridField f(spec_from_header(j));
    read_raw(resolve_payload(json_path, j.at("data").get<std::string>()), f.v.data(),
             f.v.size() * sizeof(double));
    return f;
}

void save_mask(const RegionMask& m, const std::string& json_path) {
    m.spec.validate();
    std::string bin = payload_path(json_path);
    json j = header_for(m.spec, "u8", basename_of(bin));
    write_text_file(json_path, j.dump(2) + "\n");
    write_raw(bin, m.m.data(), m.m.size());
}

RegionMask load_mask(const std::string& json_path) {
    json j = json::parse(read_text_file(json_path));
    if (j.at("dtype").get<std::string>() != "u8") throw ConfigError("expected dtype u8: " + json_path);
    RegionMask m(spec_from_header(j));
    read_raw(resolve_payload(json_path, j.at("data").get<std::string>()), m.m.data(), m.m.size());
    for (auto b : m.m)
        if (b > 1) throw ConfigError("mask payload contains values other than 0/1: " + json_path);
    return m;
}

static void csv_cells(std::ostream& out, const GridSpec& g, const char* value_header,
                      const std::function<void(std::ostream&, cell_t)>& emit) {
    out.precision(17);
    if (g.dim == 2)
        out << "i,j,x,y," << value_header << "\n";
    else
        out << "i,j,k,x,y,z," << value_header << "\n";
    for (cell_t i = 0; i < g.shape[0]; ++i)
        for (cell_t j = 0; j < g.shape[1]; ++j)
            for (cell_t k = 0; k < g.shape[2]; ++k) {
                Vec c = g.center(i, j, k);
                out << i << ',' << j << ',';
                if (g.dim == 3) out << k << ',';
                out << c[0] << ',' << c[1] << ',';
                if (g.dim == 3) out << c[2] << ',';
                emit(out, g.index(i, j, k));
                out << '\n';
            }
}

void field_to_csv(const GridField& f, const std::string& csv_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + csv_path);
    csv_cells(out, f.spec, "value", [&](std::ostream& o, cell_t idx) { o << f.at(idx); });
}

void mask_to_csv(const RegionMask& m, const std::string& csv_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + csv_path);
    csv_cells(out, m.spec, "inside", [&](std::ostream& o, cell_t idx) { o << (m.at(idx) ? 1 : 0); });
}

} // namespace eikjohn
