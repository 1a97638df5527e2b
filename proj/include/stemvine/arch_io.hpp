#pragma once

#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stemvine/errors.hpp"
#include "stemvine/format.hpp"
#include "stemvine/graph.hpp"

namespace stemvine {

// Architecture file: the network itself plus optional per-slot file
// references for weights and reference matrices.
struct ArchFile {
    StemVineNetwork network;
    std::map<std::string, std::string> weight_files;
    std::map<std::string, std::string> reference_files;
};

namespace detail {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column;
};

struct ArchLine {
    std::vector<Token> tokens;
    std::size_t line;
};

inline std::vector<ArchLine> tokenize_arch(const std::string& text) {
    std::vector<ArchLine> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        ArchLine line;
        line.line = lineno;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r') {
                ++i;
                continue;
            }
            if (raw[i] == '#') break;
            const std::size_t start = i;
            while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r' &&
                   raw[i] != '#')
                ++i;
            line.tokens.push_back({raw.substr(start, i - start), lineno, start + 1});
        }
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

// key=value attribute bag for one directive line.
class Attrs {
public:
    Attrs(const std::vector<Token>& tokens, std::size_t first, const std::string& directive)
        : directive_(directive) {
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const Token& t = tokens[i];
            const auto eq = t.text.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= t.text.size())
                throw SyntaxError("expected key=value in '" + directive + "', got '" + t.text + "'",
                                  t.line, t.column);
            const std::string key = t.text.substr(0, eq);
            if (values_.count(key))
                throw SyntaxError("duplicate attribute '" + key + "'", t.line, t.column);
            values_[key] = t;
            values_[key].text = t.text.substr(eq + 1);
        }
    }

    const Token& require(const std::string& key, std::size_t line) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw SyntaxError("'" + directive_ + "' is missing attribute '" + key + "'", line, 1);
        used_.push_back(key);
        return it->second;
    }

    const Token* optional(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return nullptr;
        used_.push_back(key);
        return &it->second;
    }

    void reject_unknown() const {
        for (const auto& [key, tok] : values_) {
            bool known = false;
            for (const auto& u : used_)
                if (u == key) known = true;
            if (!known)
                throw SyntaxError("unknown attribute '" + key + "' in '" + directive_ + "'",
                                  tok.line, tok.column);
        }
    }

private:
    std::string directive_;
    std::map<std::string, Token> values_;
    mutable std::vector<std::string> used_;
};

inline double parse_real(const Token& t) {
    char* end = nullptr;
    const double v = std::strtod(t.text.c_str(), &end);
    if (end != t.text.c_str() + t.text.size() || t.text.empty())
        throw SyntaxError("expected a real number, got '" + t.text + "'", t.line, t.column);
    return v;
}

inline std::size_t parse_size(const Token& t) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.text.c_str(), &end, 10);
    if (end != t.text.c_str() + t.text.size() || t.text.empty())
        throw SyntaxError("expected a nonnegative integer, got '" + t.text + "'", t.line, t.column);
    return static_cast<std::size_t>(v);
}

inline StemElement parse_element(const ArchLine& line) {
    const Token& head = line.tokens[0];
    Attrs attrs(line.tokens, 1, head.text);
    if (head.text == "weight") {
        WeightSlot w;
        w.in_dim = parse_size(attrs.require("in", line.line));
        w.out_dim = parse_size(attrs.require("out", line.line));
        w.profile.s = parse_real(attrs.require("s", line.line));
        w.profile.b = parse_real(attrs.require("b", line.line));
        attrs.reject_unknown();
        return w;
    }
    if (head.text == "nonlin") {
        NonlinSlot n;
        const Token& kind = attrs.require("kind", line.line);
        if (kind.text == "relu")
            n.nonlinearity = Nonlinearity::relu();
        else if (kind.text == "tanh")
            n.nonlinearity = Nonlinearity::tanh();
        else if (kind.text == "identity")
            n.nonlinearity = Nonlinearity::identity();
        else if (kind.text == "leaky_relu") {
            const double slope = parse_real(attrs.require("slope", line.line));
            if (!(slope > 0.0 && slope < 1.0))
                throw SyntaxError("leaky_relu slope must be in (0,1)", kind.line, kind.column);
            n.nonlinearity = Nonlinearity::leaky_relu(slope);
        } else
            throw SyntaxError("unknown nonlinearity kind '" + kind.text + "'", kind.line,
                              kind.column);
        n.dim = parse_size(attrs.require("dim", line.line));
        attrs.reject_unknown();
        return n;
    }
    throw SyntaxError("expected 'weight' or 'nonlin', got '" + head.text + "'", head.line,
                      head.column);
}

}  // namespace detail

// Parse the textual architecture schema (version key "stemvine/1"). Syntax
// problems raise SyntaxError with position; no semantic checks are run here.
inline ArchFile parse_arch_file(const std::string& text) {
    const auto lines = detail::tokenize_arch(text);
    if (lines.empty()) throw SyntaxError("empty architecture file", 1, 1);
    std::size_t i = 0;
    if (lines[0].tokens.size() != 1 || lines[0].tokens[0].text != "stemvine/1")
        throw SyntaxError("file must start with version key 'stemvine/1'", lines[0].line,
                          lines[0].tokens[0].column);
    ++i;

    ArchFile arch;
    bool saw_stem = false;
    while (i < lines.size()) {
        const auto& line = lines[i];
        const detail::Token& head = line.tokens[0];
        if (head.text == "stem") {
            if (saw_stem) throw SyntaxError("duplicate stem section", head.line, head.column);
            if (line.tokens.size() != 2 || line.tokens[1].text != "{")
                throw SyntaxError("expected 'stem {'", head.line, head.column);
            ++i;
            while (i < lines.size() && lines[i].tokens[0].text != "}") {
                arch.network.stem.push_back(detail::parse_element(lines[i]));
                ++i;
            }
            if (i == lines.size()) throw SyntaxError("unterminated stem section", head.line, 1);
            ++i;  // closing brace
            saw_stem = true;
        } else if (head.text == "vine") {
            const bool braced = line.tokens.back().text == "{";
            const bool identity = line.tokens.back().text == "identity";
            if (!braced && !identity)
                throw SyntaxError("vine line must end with 'identity' or '{'", head.line,
                                  head.column);
            std::vector<detail::Token> attr_tokens(line.tokens.begin(), line.tokens.end() - 1);
            detail::Attrs attrs(attr_tokens, 1, "vine");
            Vine vine;
            vine.u = detail::parse_size(attrs.require("u", line.line));
            vine.v = detail::parse_size(attrs.require("v", line.line));
            vine.copy = detail::parse_size(attrs.require("copy", line.line));
            attrs.reject_unknown();
            ++i;
            if (braced) {
                while (i < lines.size() && lines[i].tokens[0].text != "}") {
                    vine.body.push_back(detail::parse_element(lines[i]));
                    ++i;
                }
                if (i == lines.size()) throw SyntaxError("unterminated vine body", head.line, 1);
                ++i;
            }
            arch.network.vines.push_back(std::move(vine));
        } else if (head.text == "weightfile" || head.text == "reffile") {
            detail::Attrs attrs(line.tokens, 1, head.text);
            const std::string slot = attrs.require("slot", line.line).text;
            const std::string path = attrs.require("path", line.line).text;
            attrs.reject_unknown();
            auto& map = head.text == "weightfile" ? arch.weight_files : arch.reference_files;
            if (map.count(slot))
                throw SyntaxError("duplicate " + head.text + " for slot '" + slot + "'", head.line,
                                  head.column);
            map[slot] = path;
            ++i;
        } else {
            throw SyntaxError("unknown directive '" + head.text + "'", head.line, head.column);
        }
    }
    if (!saw_stem) throw SyntaxError("architecture file has no stem section", 1, 1);
    return arch;
}

// Parse and enforce network invariants; violations raise SemanticError.
inline StemVineNetwork parse_network(const std::string& text) {
    ArchFile arch = parse_arch_file(text);
    const auto violations = validate(arch.network);
    if (!violations.empty()) {
        std::string msg = "architecture violates network invariants:";
        for (const auto& v : violations) msg += "\n  [" + v.rule + "] " + v.detail;
        throw SemanticError(msg);
    }
    return arch.network;
}

namespace detail {

inline void serialize_element(std::ostringstream& out, const StemElement& e,
                              const std::string& indent) {
    if (is_weight(e)) {
        const auto& w = std::get<WeightSlot>(e);
        out << indent << "weight in=" << w.in_dim << " out=" << w.out_dim
            << " s=" << format_double(w.profile.s) << " b=" << format_double(w.profile.b) << "\n";
    } else {
        const auto& n = std::get<NonlinSlot>(e);
        out << indent << "nonlin kind=" << to_string(n.nonlinearity.kind);
        if (n.nonlinearity.kind == NonlinKind::leaky_relu)
            out << " slope=" << format_double(n.nonlinearity.slope);
        out << " dim=" << n.dim << "\n";
    }
}

}  // namespace detail

inline std::string serialize_arch_file(const ArchFile& arch) {
    std::ostringstream out;
    out << "stemvine/1\n";
    out << "stem {\n";
    for (const auto& e : arch.network.stem) detail::serialize_element(out, e, "  ");
    out << "}\n";
    for (const auto& vine : arch.network.vines) {
        out << "vine u=" << vine.u << " v=" << vine.v << " copy=" << vine.copy;
        if (vine.is_identity()) {
            out << " identity\n";
        } else {
            out << " {\n";
            for (const auto& e : vine.body) detail::serialize_element(out, e, "  ");
            out << "}\n";
        }
    }
    for (const auto& [slot, path] : arch.weight_files)
        out << "weightfile slot=" << slot << " path=" << path << "\n";
    for (const auto& [slot, path] : arch.reference_files)
        out << "reffile slot=" << slot << " path=" << path << "\n";
    return out.str();
}

inline std::string serialize_network(const StemVineNetwork& net) {
    ArchFile arch;
    arch.network = net;
    return serialize_arch_file(arch);
}

}  // namespace stemvine
