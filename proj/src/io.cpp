#include "pemap/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pemap {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

std::string RunConfig::emit() const {
    std::ostringstream os;
    os << "# source pseudoellipsoid\n";
    os << "m = " << join_ints(m) << "\n";
    os << "alpha = " << join_ints(alpha) << "\n";
    os << "# target pseudoellipsoid\n";
    os << "n = " << join_ints(n) << "\n";
    os << "beta = " << join_ints(beta) << "\n";
    os << "p = " << p << "\n";
    os << "# construction\n";
    os << "L = " << L << "\n";
    os << "seed = " << seed << "\n";
    os << "eps0 = " << fmt17(eps0) << "\n";
    os << "iota = " << fmt17(iota) << "\n";
    os << "density = " << density << "\n";
    os << "probes = " << probes << "\n";
    os << "eta = " << fmt17(eta) << "\n";
    os << "# tolerances\n";
    os << "tail_tol = " << fmt17(tail_tol) << "\n";
    os << "boundary_tol = " << fmt17(boundary_tol) << "\n";
    os << "root_tol = " << fmt17(root_tol) << "\n";
    os << "out = " << out << "\n";
    return os.str();
}

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw config_error("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "m")
            c.m = parse_int_list(val);
        else if (key == "alpha")
            c.alpha = parse_int_list(val);
        else if (key == "n")
            c.n = parse_int_list(val);
        else if (key == "beta")
            c.beta = parse_int_list(val);
        else if (key == "p")
            c.p = std::stoi(val);
        else if (key == "L")
            c.L = std::stoi(val);
        else if (key == "seed")
            c.seed = std::stoull(val);
        else if (key == "eps0")
            c.eps0 = std::stod(val);
        else if (key == "iota")
            c.iota = std::stod(val);
        else if (key == "density")
            c.density = std::stoi(val);
        else if (key == "probes")
            c.probes = std::stoi(val);
        else if (key == "eta")
            c.eta = std::stod(val);
        else if (key == "tail_tol")
            c.tail_tol = std::stod(val);
        else if (key == "boundary_tol")
            c.boundary_tol = std::stod(val);
        else if (key == "root_tol")
            c.root_tol = std::stod(val);
        else if (key == "out")
            c.out = val;
        else
            throw config_error("config: unknown key: " + key);
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) { return parse_text(read_text_file(path)); }

void RunConfig::save(const std::string& path) const { write_text_file(path, emit()); }

json vector_to_json(const BlockedVector& v) {
    json j = json::array();
    for (const cx& z : v) j.push_back({z.real(), z.imag()});
    return j;
}

BlockedVector vector_from_json(const json& j) {
    BlockedVector v;
    for (const auto& e : j) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return v;
}

json net_to_json(const BoundaryNet& net) {
    json j;
    json pts = json::array();
    for (const auto& p : net.points) pts.push_back(vector_to_json(p));
    j["points"] = pts;
    j["group_sizes"] = net.group_sizes;
    j["covering_radius"] = net.covering_radius;
    j["max_pair_dist"] = net.max_pair_dist;
    j["seed"] = net.seed;
    j["density"] = net.density;
    return j;
}

BoundaryNet net_from_json(const json& j) {
    BoundaryNet net;
    for (const auto& p : j.at("points")) net.points.push_back(vector_from_json(p));
    net.group_sizes = j.at("group_sizes").get<std::vector<int>>();
    net.covering_radius = j.at("covering_radius");
    net.max_pair_dist = j.at("max_pair_dist");
    net.seed = j.at("seed");
    net.density = j.at("density");
    return net;
}

json checkpoint_to_json(const MapState& state, const EstimateConstants& consts,
                        const Schedule& sched, double nu_base) {
    json j;
    j["format"] = "pemap-checkpoint-v1";
    j["source"] = {{"m", state.sig.m}, {"alpha", state.sig.alpha}};
    j["target"] = {{"n", state.tsig.n}, {"beta", state.tsig.beta}, {"p", state.tsig.p}};
    j["norm_convention"] = "paired twin blocks, 2 N_{t+1} + p components";
    json net_j = net_to_json(state.net);
    json dup = json::array();
    for (int i = 0; i < state.tsig.num_indices(); ++i) dup.push_back(state.tsig.point_of_index(i));
    net_j["index_to_point"] = dup;
    j["net"] = net_j;
    j["constants"] = consts.to_json();
    j["schedule"] = sched.to_json();
    j["h"] = {{"iota", state.h_cfg.iota},
              {"tail_tol", state.h_cfg.tail_tol},
              {"k_max", state.h_cfg.k_max}};
    j["nu_base"] = nu_base;
    json layers = json::array();
    for (const auto& st : state.layers) {
        json l;
        l["a"] = st.a;
        l["eps"] = st.eps;
        l["T"] = st.T;
        l["nu"] = st.nu;
        l["eta"] = st.eta;
        l["clamped_zero"] = st.clamped_zero;
        l["clamped_unit"] = st.clamped_unit;
        l["gamma"] = vector_to_json(st.gamma);
        layers.push_back(l);
    }
    j["layers"] = layers;
    return j;
}

Checkpoint checkpoint_from_json(const json& j) {
    if (j.at("format") != "pemap-checkpoint-v1")
        throw config_error("checkpoint: unknown format");
    Checkpoint cp;
    const SourceSignature sig(j.at("source").at("m").get<std::vector<int>>(),
                              j.at("source").at("alpha").get<std::vector<int>>());
    const TargetSignature tsig(j.at("target").at("n").get<std::vector<int>>(),
                               j.at("target").at("beta").get<std::vector<int>>(),
                               j.at("target").at("p").get<int>());
    BoundaryNet net = net_from_json(j.at("net"));
    ConjugatePairConfig hc;
    hc.iota = j.at("h").at("iota");
    hc.tail_tol = j.at("h").at("tail_tol");
    hc.k_max = j.at("h").at("k_max");
    cp.state = make_state(sig, tsig, net, hc);
    for (const auto& l : j.at("layers")) {
        Step st;
        st.a = l.at("a");
        st.eps = l.at("eps");
        st.T = l.at("T");
        st.nu = l.at("nu");
        st.eta = l.at("eta");
        st.clamped_zero = l.at("clamped_zero");
        st.clamped_unit = l.at("clamped_unit");
        st.gamma = vector_from_json(l.at("gamma"));
        cp.state.layers.push_back(std::move(st));
    }
    cp.consts = EstimateConstants::from_json(j.at("constants"));
    cp.schedule = Schedule::from_json(j.at("schedule"));
    cp.nu_base = j.at("nu_base");
    return cp;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ",";
        os << header[i];
    }
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << row[i];
        }
        os << "\n";
    }
    write_text_file(path, os.str());
}

}  // namespace pemap
