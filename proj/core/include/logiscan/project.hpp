#pragma once

#include "logiscan/ast.hpp"
#include "logiscan/source.hpp"

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

/// Directory segments excluded from a scan unless overridden.
const std::vector<std::string>& default_exclusion_segments();

struct ExcludedFile {
    std::string path;
    std::string reason;
};

struct ProjectLayout {
    std::filesystem::path root;
    std::vector<std::shared_ptr<const SourceFile>> included;
    std::vector<ExcludedFile> excluded;
};

/// Finds every `.sol` file under `root`. A file is excluded when any directory
/// segment of its root-relative path matches an exclusion segment
/// (case-insensitive); the matched segment is the reason. Paths are recorded
/// relative to `root` with forward slashes, sorted.
ProjectLayout discover_sources(const std::filesystem::path& root,
                               const std::vector<std::string>& exclusion_segments = default_exclusion_segments());

/// `<visibility> <Contract>.<name>(<type>,<type>)`
std::string canonical_signature(const FunctionRecord& fn, std::string_view as_contract);

class SignatureSet {
public:
    SignatureSet() = default;
    SignatureSet(std::set<std::string> entries, std::string source);

    /// One canonical signature per line; blank lines and `#` comments ignored.
    /// Throws IoError if unreadable, Error on a malformed entry.
    static SignatureSet load(const std::filesystem::path& file);
    static SignatureSet parse(std::string_view text, std::string source = "<memory>");

    bool contains(const std::string& sig) const { return entries_.contains(sig); }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::set<std::string>& entries() const noexcept { return entries_; }
    const std::string& source() const noexcept { return source_; }

    /// True when `sig` has the canonical `<vis> <C>.<name>(<types>)` shape.
    static bool well_formed(std::string_view sig);

private:
    std::set<std::string> entries_;
    std::string source_;
};

/// True if `fn`'s signature under its own contract or any direct base is in `wl`.
bool is_whitelisted(const FunctionRecord& fn, const SignatureSet& wl);

/// Drops whitelisted functions, preserving the order of the rest.
std::vector<FunctionRecord> filter_openzeppelin(const std::vector<FunctionRecord>& functions,
                                                const SignatureSet& wl);

} // namespace logiscan
