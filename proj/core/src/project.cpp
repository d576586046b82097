#include "logiscan/project.hpp"

#include "logiscan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace logiscan {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// ABI-style normalization of a parameter type for signature comparison.
std::string canonical_type(std::string type)
{
    if (type == "address payable") {
        return "address";
    }
    auto replace_word = [&](std::string_view word, std::string_view with) {
        if (type.starts_with(word) &&
            (type.size() == word.size() || type[word.size()] == '[')) {
            type = std::string(with) + type.substr(word.size());
        }
    };
    replace_word("uint", "uint256");
    replace_word("int", "int256");
    replace_word("byte", "bytes1");
    return type;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

const std::vector<std::string>& default_exclusion_segments()
{
    static const std::vector<std::string> segments{
        "node_modules", "test", "tests", "mock", "mocks", "lib", "openzeppelin", "uniswap", "pancakeswap"};
    return segments;
}

ProjectLayout discover_sources(const fs::path& root, const std::vector<std::string>& exclusion_segments)
{
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("project root is not a readable directory: " + root.string());
    }
    ProjectLayout layout;
    layout.root = root;

    std::vector<std::string> excluded_lower;
    excluded_lower.reserve(exclusion_segments.size());
    for (const auto& s : exclusion_segments) {
        excluded_lower.push_back(lower(s));
    }

    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw IoError("cannot read project root " + root.string() + ": " + ec.message());
    }
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            break;
        }
        if (it->is_regular_file(ec) && it->path().extension() == ".sol") {
            files.push_back(it->path());
        }
    }
    std::vector<std::pair<std::string, fs::path>> rel;
    rel.reserve(files.size());
    for (const auto& f : files) {
        rel.emplace_back(fs::relative(f, root, ec).generic_string(), f);
    }
    std::sort(rel.begin(), rel.end());

    for (const auto& [relpath, full] : rel) {
        std::string reason;
        const fs::path rp(relpath);
        for (auto seg = rp.begin(); seg != rp.end() && reason.empty(); ++seg) {
            if (std::next(seg) == rp.end()) {
                break;
            }
            const std::string s = lower(seg->string());
            if (std::find(excluded_lower.begin(), excluded_lower.end(), s) != excluded_lower.end()) {
                reason = s;
            }
        }
        if (!reason.empty()) {
            layout.excluded.push_back({relpath, reason});
            continue;
        }
        try {
            layout.included.push_back(SourceFile::load(full, relpath));
        } catch (const IoError&) {
            layout.excluded.push_back({relpath, "io-error"});
        }
    }
    return layout;
}

std::string canonical_signature(const FunctionRecord& fn, std::string_view as_contract)
{
    std::string out(to_string(fn.visibility));
    out += ' ';
    out += as_contract;
    out += '.';
    out += fn.display_name();
    out += '(';
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += canonical_type(fn.params[i].type);
    }
    out += ')';
    return out;
}

SignatureSet::SignatureSet(std::set<std::string> entries, std::string source)
    : entries_(std::move(entries)), source_(std::move(source))
{
}

bool SignatureSet::well_formed(std::string_view sig)
{
    static const std::regex re(
        R"(^(public|external|internal|private) [A-Za-z_$][A-Za-z0-9_$]*\.[A-Za-z_$][A-Za-z0-9_$]*\([^\s()]*\)$)");
    return std::regex_match(sig.begin(), sig.end(), re);
}

SignatureSet SignatureSet::parse(std::string_view text, std::string source)
{
    std::set<std::string> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string entry = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (entry.empty()) {
            continue;
        }
        if (!well_formed(entry)) {
            throw Error(source + ":" + std::to_string(lineno) + ": malformed signature '" + entry + "'");
        }
        entries.insert(entry);
    }
    return SignatureSet(std::move(entries), std::move(source));
}

SignatureSet SignatureSet::load(const fs::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot open whitelist " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.string());
}

bool is_whitelisted(const FunctionRecord& fn, const SignatureSet& wl)
{
    if (wl.empty()) {
        return false;
    }
    if (wl.contains(canonical_signature(fn, fn.contract))) {
        return true;
    }
    return std::any_of(fn.contract_bases.begin(), fn.contract_bases.end(),
                       [&](const std::string& base) { return wl.contains(canonical_signature(fn, base)); });
}

std::vector<FunctionRecord> filter_openzeppelin(const std::vector<FunctionRecord>& functions,
                                                const SignatureSet& wl)
{
    std::vector<FunctionRecord> out;
    out.reserve(functions.size());
    for (const auto& fn : functions) {
        if (!is_whitelisted(fn, wl)) {
            out.push_back(fn);
        }
    }
    return out;
}

} // namespace logiscan
