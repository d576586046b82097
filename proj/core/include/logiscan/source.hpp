#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace logiscan {

/// 1-based line/column position.
struct LineCol {
    std::size_t line = 1;
    std::size_t column = 1;
    bool operator==(const LineCol&) const = default;
};

/// Half-open byte range into a source file plus its inclusive line range.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t first_line = 0;
    std::size_t last_line = 0;
    bool operator==(const Span&) const = default;
};

/// A Solidity file loaded into memory with a line-start table.
class SourceFile {
public:
    SourceFile(std::string path, std::string text);

    static std::shared_ptr<const SourceFile> load(const std::filesystem::path& file,
                                                  std::string display_path);

    const std::string& path() const noexcept { return path_; }
    const std::string& text() const noexcept { return text_; }

    /// Maps a byte offset (0 <= offset <= size) to a 1-based line/column.
    LineCol locate(std::size_t offset) const;
    std::size_t line_of(std::size_t offset) const { return locate(offset).line; }
    std::size_t line_count() const noexcept { return line_starts_.size(); }

    /// Text of 1-based line `line` without its terminator.
    std::string_view line_text(std::size_t line) const;
    std::string_view slice(std::size_t begin, std::size_t end) const;

    Span span(std::size_t begin, std::size_t end) const;

private:
    std::string path_;
    std::string text_;
    std::vector<std::size_t> line_starts_;
};

/// Replaces `//` and `/* */` comments with spaces, leaving string literals and
/// newlines intact so byte offsets and line numbers survive.
std::string strip_comments(std::string_view text);

/// Counts lines that are neither blank nor comment-only.
std::size_t count_code_lines(std::string_view text);

} // namespace logiscan
