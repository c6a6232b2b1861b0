#include "json_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hvis/rle.hpp"

namespace hvis::io_detail {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
    }
}

json parse_document(std::string_view text, std::string_view source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::ParseError, std::string(source) + ":" + std::to_string(line) + ":" +
                                               std::to_string(col) + ": " + e.what());
    }
}

const json& field(const json& obj, std::string_view key, std::string_view where) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::SchemaError, std::string(where) + " is not an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw Error(ErrorCode::SchemaError,
                    "missing field '" + std::string(key) + "' in " + std::string(where));
    }
    return *it;
}

int int_field(const json& obj, std::string_view key, std::string_view where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer()) {
        throw Error(ErrorCode::SchemaError,
                    std::string(where) + "." + std::string(key) + " must be an integer");
    }
    return v.get<int>();
}

double number_field(const json& obj, std::string_view key, std::string_view where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) {
        throw Error(ErrorCode::SchemaError,
                    std::string(where) + "." + std::string(key) + " must be a number");
    }
    return v.get<double>();
}

std::string string_field(const json& obj, std::string_view key, std::string_view where) {
    const json& v = field(obj, key, where);
    if (!v.is_string()) {
        throw Error(ErrorCode::SchemaError,
                    std::string(where) + "." + std::string(key) + " must be a string");
    }
    return v.get<std::string>();
}

void check_version(const json& doc, std::string_view where) {
    const int version = int_field(doc, "format_version", where);
    if (version != kFormatVersion) {
        throw Error(ErrorCode::SchemaError, "unsupported format_version " +
                                                std::to_string(version) + " in " +
                                                std::string(where));
    }
}

BinaryMask mask_field(const json& obj, int width, int height, std::string_view where) {
    const std::string at(where);
    if (const auto it = obj.find("rle"); it != obj.end()) {
        std::vector<std::uint32_t> counts;
        if (it->is_string()) {
            std::istringstream in(it->get<std::string>());
            long long c = 0;
            while (in >> c) {
                if (c < 0) {
                    throw Error(ErrorCode::SchemaError, at + ".rle has a negative count");
                }
                counts.push_back(static_cast<std::uint32_t>(c));
            }
            if (!in.eof()) {
                throw Error(ErrorCode::ParseError, at + ".rle is not a list of integers");
            }
        } else if (it->is_array()) {
            for (const auto& c : *it) {
                if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0)) {
                    throw Error(ErrorCode::SchemaError, at + ".rle must hold nonnegative integers");
                }
                counts.push_back(c.get<std::uint32_t>());
            }
        } else {
            throw Error(ErrorCode::SchemaError, at + ".rle must be an array or string");
        }
        try {
            return rle_decode(counts, width, height);
        } catch (const Error& e) {
            throw Error(e.code(), at + ": " + e.what());
        }
    }
    if (const auto it = obj.find("polygon"); it != obj.end()) {
        if (!it->is_array()) {
            throw Error(ErrorCode::SchemaError, at + ".polygon must be an array of rings");
        }
        std::vector<std::vector<double>> rings;
        for (const auto& ring : *it) {
            if (!ring.is_array()) {
                throw Error(ErrorCode::SchemaError, at + ".polygon ring must be an array");
            }
            std::vector<double> coords;
            for (const auto& c : ring) {
                if (!c.is_number()) {
                    throw Error(ErrorCode::SchemaError, at + ".polygon holds a non-number");
                }
                coords.push_back(c.get<double>());
            }
            rings.push_back(std::move(coords));
        }
        try {
            return rasterize_polygons(rings, width, height);
        } catch (const Error& e) {
            throw Error(e.code(), at + ": " + e.what());
        }
    }
    throw Error(ErrorCode::SchemaError, at + " needs an 'rle' or 'polygon' mask");
}

json rle_json(const BinaryMask& mask) { return json(rle_encode(mask)); }

double round9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace hvis::io_detail
