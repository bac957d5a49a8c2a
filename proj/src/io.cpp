#include "mmcoal/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmcoal/errors.hpp"

namespace mmcoal {

namespace {

using json = nlohmann::json;

// 1-based line of a byte offset
std::size_t line_of(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset; ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Line of the first occurrence of a quoted key, when it can be located.
std::string where(std::string_view text, const std::string& source, const std::string& key) {
    std::ostringstream os;
    os << source;
    if (!key.empty()) {
        const auto pos = text.find("\"" + key + "\"");
        if (pos != std::string_view::npos) os << ":" << line_of(text, pos);
    }
    return os.str();
}

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << line_of(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
        throw ParseError(os.str());
    }
}

[[noreturn]] void fail(std::string_view text, const std::string& source, const std::string& key,
                       const std::string& msg) {
    throw ParseError(where(text, source, key) + ": " + msg);
}

double number(const json& j, std::string_view text, const std::string& source, const std::string& key) {
    if (!j.is_number()) fail(text, source, key, "'" + key + "' must be a number");
    return j.get<double>();
}

}  // namespace

DataSet parse_data(std::string_view text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) fail(text, source, "", "top level must be an object");
    if (!doc.contains("loci") || !doc["loci"].is_array() || doc["loci"].empty())
        fail(text, source, "loci", "'loci' must be a non-empty array");

    std::vector<Locus> loci;
    for (const auto& lj : doc["loci"]) {
        if (!lj.is_object()) fail(text, source, "loci", "each locus must be an object");
        Locus loc;
        if (!lj.contains("alleles") || !lj["alleles"].is_number_integer())
            fail(text, source, "alleles", "locus needs an integer 'alleles'");
        loc.alleles = lj["alleles"].get<int>();
        if (loc.alleles < 2) fail(text, source, "alleles", "a locus needs at least two alleles");
        if (!lj.contains("theta")) fail(text, source, "loci", "locus needs 'theta'");
        loc.theta = number(lj["theta"], text, source, "theta");
        loc.matrix.resize(loc.alleles, loc.alleles);
        if (lj.contains("matrix")) {
            const auto& m = lj["matrix"];
            if (!m.is_array() || static_cast<int>(m.size()) != loc.alleles)
                fail(text, source, "matrix", "'matrix' must have one row per allele");
            for (int r = 0; r < loc.alleles; ++r) {
                if (!m[r].is_array() || static_cast<int>(m[r].size()) != loc.alleles)
                    fail(text, source, "matrix", "'matrix' rows must have one entry per allele");
                for (int c = 0; c < loc.alleles; ++c) loc.matrix(r, c) = number(m[r][c], text, source, "matrix");
            }
        } else {
            // uniform jump to a different allele
            loc.matrix.setConstant(1.0 / (loc.alleles - 1));
            loc.matrix.diagonal().setZero();
        }
        loci.push_back(std::move(loc));
    }

    DataSet out{[&] {
                    try {
                        return MutationModel(std::move(loci));
                    } catch (const std::invalid_argument& e) {
                        fail(text, source, "loci", e.what());
                    }
                }(),
                SampleConfig{}, std::nullopt};

    if (!doc.contains("haplotypes") || !doc["haplotypes"].is_object())
        fail(text, source, "haplotypes", "'haplotypes' must be an object mapping haplotype strings to counts");
    for (const auto& [key, val] : doc["haplotypes"].items()) {
        if (!val.is_number_integer() || val.get<long long>() < 1)
            fail(text, source, key, "count for haplotype '" + key + "' must be a positive integer");
        HapId h;
        try {
            h = out.model.parse(key);
        } catch (const ParseError& e) {
            fail(text, source, key, e.what());
        }
        out.sample.add(h, val.get<int>());
    }
    if (out.sample.total() < 1) fail(text, source, "haplotypes", "sample is empty");
    if (doc.contains("seed") && !doc["seed"].is_null()) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            fail(text, source, "seed", "'seed' must be an integer");
        out.seed = doc["seed"].get<std::uint64_t>();
    }
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DataSet read_data(const std::string& path) { return parse_data(read_text(path), path); }

std::string format_data(const DataSet& data) {
    nlohmann::ordered_json doc;
    doc["loci"] = nlohmann::ordered_json::array();
    for (const auto& loc : data.model.loci()) {
        nlohmann::ordered_json lj;
        lj["alleles"] = loc.alleles;
        lj["theta"] = loc.theta;
        auto rows = nlohmann::ordered_json::array();
        for (int r = 0; r < loc.alleles; ++r) {
            auto row = nlohmann::ordered_json::array();
            for (int c = 0; c < loc.alleles; ++c) row.push_back(loc.matrix(r, c));
            rows.push_back(row);
        }
        lj["matrix"] = rows;
        doc["loci"].push_back(lj);
    }
    nlohmann::ordered_json haps = nlohmann::ordered_json::object();
    for (const auto& [h, c] : data.sample.entries()) haps[data.model.format(h)] = c;
    doc["haplotypes"] = haps;
    if (data.seed) doc["seed"] = *data.seed;
    return doc.dump(2) + "\n";
}

void write_data(const DataSet& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << format_data(data);
}

XiMeasure parse_xi_measure(std::string_view text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) fail(text, source, "", "measure must be an object");
    const double k0 = doc.contains("kingman_mass") ? number(doc["kingman_mass"], text, source, "kingman_mass") : 0.0;
    std::vector<XiAtom> atoms;
    if (doc.contains("atoms")) {
        if (!doc["atoms"].is_array()) fail(text, source, "atoms", "'atoms' must be an array");
        for (const auto& a : doc["atoms"]) {
            if (!a.is_object() || !a.contains("coords") || !a["coords"].is_array() || !a.contains("mass"))
                fail(text, source, "atoms", "each atom needs 'coords' (array) and 'mass'");
            XiAtom atom;
            for (const auto& c : a["coords"]) atom.coords.push_back(number(c, text, source, "coords"));
            atom.mass = number(a["mass"], text, source, "mass");
            atoms.push_back(std::move(atom));
        }
    }
    std::optional<BetaComponent> beta;
    if (doc.contains("beta")) {
        const auto& b = doc["beta"];
        if (!b.is_object() || !b.contains("alpha") || !b.contains("mass"))
            fail(text, source, "beta", "'beta' needs 'alpha' and 'mass'");
        beta = BetaComponent{number(b["alpha"], text, source, "alpha"), number(b["mass"], text, source, "mass")};
    }
    try {
        return XiMeasure(k0, std::move(atoms), beta);
    } catch (const ConfigError& e) {
        fail(text, source, "", e.what());
    }
}

LambdaMeasure parse_lambda_measure(std::string_view text, const std::string& source) {
    const XiMeasure xi = parse_xi_measure(text, source);
    std::vector<PointAtom> atoms;
    for (const auto& a : xi.atoms()) {
        if (a.coords.size() != 1) fail(text, source, "coords", "a Lambda measure needs one coordinate per atom");
        atoms.push_back({a.coords[0], a.mass});
    }
    try {
        return LambdaMeasure(xi.kingman_mass(), std::move(atoms), xi.beta_component());
    } catch (const ConfigError& e) {
        fail(text, source, "", e.what());
    }
}

std::vector<double> parse_grid(std::string_view text) {
    auto to_double = [&](std::string_view s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(std::string(s), &used);
            if (used != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("grid '" + std::string(text) + "': bad number '" + std::string(s) + "'");
        }
    };
    const auto c1 = text.find(':');
    if (c1 == std::string_view::npos) return {to_double(text)};
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigError("grid '" + std::string(text) + "': expected lo:hi:count");
    const double lo = to_double(text.substr(0, c1));
    const double hi = to_double(text.substr(c1 + 1, c2 - c1 - 1));
    const double cnt = to_double(text.substr(c2 + 1));
    if (cnt < 1 || cnt != std::floor(cnt)) throw ConfigError("grid '" + std::string(text) + "': count must be a positive integer");
    const int count = static_cast<int>(cnt);
    if (count == 1) return {lo};
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1));
    return out;
}

}  // namespace mmcoal
