#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "lcsnav/lcs.hpp"

namespace lcsnav {

namespace {

constexpr std::string_view kMagic = "lcsnav-policy 1";

void put_double(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}
    std::string next(const char* what) {
        std::string line;
        if (!std::getline(in_, line)) throw PolicyFormatError(line_ + 1, std::string("expected ") + what);
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }
    int line() const { return line_; }

private:
    std::istream& in_;
    int line_ = 0;
};

template <typename T>
T parse_number(std::string_view tok, int line, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw PolicyFormatError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
    return v;
}

std::size_t parse_count(const std::string& line, std::string_view keyword, int lineno) {
    if (line.rfind(keyword, 0) != 0 || line.size() <= keyword.size() + 1)
        throw PolicyFormatError(lineno, "expected '" + std::string(keyword) + " <count>'");
    return parse_number<std::size_t>(std::string_view(line).substr(keyword.size() + 1), lineno, "count");
}

}  // namespace

// Layout:
//   lcsnav-policy 1
//   fusion rule2
//   registry <k> / <k> lines of key=value
//   predicates <n> / <n> names
//   genes <m> / <m> lines: action weight birth active permanent alpha_1 .. alpha_n
std::string save_policy(const Policy& p) {
    std::string out(kMagic);
    out += "\nfusion ";
    out += fusion_rule_name(p.fusion);
    const auto kv = p.registry.to_map();
    out += "\nregistry " + std::to_string(kv.size()) + "\n";
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    out += "predicates " + std::to_string(p.predicate_names.size()) + "\n";
    for (const auto& name : p.predicate_names) out += name + "\n";
    const auto& genes = p.genes.genes();
    out += "genes " + std::to_string(genes.size()) + "\n";
    for (const Gene& g : genes) {
        out += action_name(g.action);
        out += ' ';
        put_double(out, g.weight);
        out += ' ' + std::to_string(g.birth_step) + ' ' + (g.active ? '1' : '0') + ' ' +
               (g.permanent ? '1' : '0');
        for (double a : g.alpha) {
            out += ' ';
            put_double(out, a);
        }
        out += '\n';
    }
    return out;
}

Policy load_policy(std::istream& in) {
    LineReader r(in);
    if (r.next("header") != kMagic) throw PolicyFormatError(1, "not an lcsnav policy file");
    Policy p;
    const std::string fusion = r.next("fusion line");
    if (fusion.rfind("fusion ", 0) != 0) throw PolicyFormatError(r.line(), "expected 'fusion <rule>'");
    try {
        p.fusion = parse_fusion_rule(fusion.substr(7));
    } catch (const std::invalid_argument& e) {
        throw PolicyFormatError(r.line(), e.what());
    }

    const std::size_t nkv = parse_count(r.next("registry"), "registry", r.line());
    std::map<std::string, std::string> kv;
    for (std::size_t i = 0; i < nkv; ++i) {
        const std::string line = r.next("registry entry");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw PolicyFormatError(r.line(), "expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    try {
        p.registry = RegistryConfig::from_map(kv);
    } catch (const std::exception& e) {
        throw PolicyFormatError(r.line(), e.what());
    }

    const std::size_t n = parse_count(r.next("predicates"), "predicates", r.line());
    for (std::size_t i = 0; i < n; ++i) p.predicate_names.push_back(r.next("predicate name"));

    const std::size_t m = parse_count(r.next("genes"), "genes", r.line());
    p.genes = GeneSet(n, PopulationConfig{});
    for (std::size_t i = 0; i < m; ++i) {
        std::istringstream ls(r.next("gene"));
        std::string tok;
        std::vector<std::string> toks;
        while (ls >> tok) toks.push_back(tok);
        if (toks.size() != 5 + n)
            throw PolicyFormatError(r.line(), "gene needs " + std::to_string(5 + n) + " fields");
        Gene g;
        const auto action = parse_action(toks[0]);
        if (!action) throw PolicyFormatError(r.line(), "unknown action '" + toks[0] + "'");
        g.action = *action;
        g.weight = parse_number<double>(toks[1], r.line(), "weight");
        g.birth_step = parse_number<std::int64_t>(toks[2], r.line(), "birth step");
        g.active = toks[3] == "1";
        g.permanent = toks[4] == "1";
        g.alpha.resize(n);
        for (std::size_t k = 0; k < n; ++k) g.alpha[k] = parse_number<double>(toks[5 + k], r.line(), "coefficient");
        try {
            p.genes.add(std::move(g));
        } catch (const std::invalid_argument& e) {
            throw PolicyFormatError(r.line(), e.what());
        }
    }
    return p;
}

Policy load_policy_string(const std::string& text) {
    std::istringstream in(text);
    return load_policy(in);
}

Policy load_policy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file " + path);
    return load_policy(in);
}

}  // namespace lcsnav
