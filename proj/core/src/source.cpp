#include "logiscan/source.hpp"

#include "logiscan/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace logiscan {

SourceFile::SourceFile(std::string path, std::string text)
    : path_(std::move(path)), text_(std::move(text))
{
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i) {
        if (text_[i] == '\n') {
            line_starts_.push_back(i + 1);
        }
    }
}

std::shared_ptr<const SourceFile> SourceFile::load(const std::filesystem::path& file,
                                                   std::string display_path)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read " + file.string());
    }
    return std::make_shared<const SourceFile>(std::move(display_path), buf.str());
}

LineCol SourceFile::locate(std::size_t offset) const
{
    offset = std::min(offset, text_.size());
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const auto line = static_cast<std::size_t>(it - line_starts_.begin());
    return LineCol{line, offset - line_starts_[line - 1] + 1};
}

std::string_view SourceFile::line_text(std::size_t line) const
{
    if (line == 0 || line > line_starts_.size()) {
        return {};
    }
    const std::size_t begin = line_starts_[line - 1];
    std::size_t end = line < line_starts_.size() ? line_starts_[line] - 1 : text_.size();
    if (end > begin && text_[end - 1] == '\r') {
        --end;
    }
    return std::string_view(text_).substr(begin, end - begin);
}

std::string_view SourceFile::slice(std::size_t begin, std::size_t end) const
{
    begin = std::min(begin, text_.size());
    end = std::clamp(end, begin, text_.size());
    return std::string_view(text_).substr(begin, end - begin);
}

Span SourceFile::span(std::size_t begin, std::size_t end) const
{
    const std::size_t last = end > begin ? end - 1 : begin;
    return Span{begin, end, line_of(begin), line_of(last)};
}

std::string strip_comments(std::string_view text)
{
    std::string out(text);
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '"' || c == '\'') {
            ++i;
            while (i < n && text[i] != c && text[i] != '\n') {
                i += (text[i] == '\\' && i + 1 < n) ? 2 : 1;
            }
            ++i;
        } else if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') {
                out[i++] = ' ';
            }
        } else if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            out[i] = out[i + 1] = ' ';
            i += 2;
            while (i < n && !(text[i] == '*' && i + 1 < n && text[i + 1] == '/')) {
                if (text[i] != '\n') {
                    out[i] = ' ';
                }
                ++i;
            }
            if (i < n) {
                out[i] = out[i + 1] = ' ';
                i += 2;
            }
        } else {
            ++i;
        }
    }
    return out;
}

std::size_t count_code_lines(std::string_view text)
{
    const std::string plain = strip_comments(text);
    std::size_t count = 0;
    bool has_code = false;
    for (const char c : plain) {
        if (c == '\n') {
            count += has_code ? 1 : 0;
            has_code = false;
        } else if (c != ' ' && c != '\t' && c != '\r') {
            has_code = true;
        }
    }
    return count + (has_code ? 1 : 0);
}

} // namespace logiscan
