#include "hvis/detections.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>

#include "hvis/rle.hpp"
#include "json_util.hpp"

namespace hvis {

using namespace io_detail;

std::string serialize_detections(std::span<const DetectionSequence> sequences) {
    std::string out;
    for (const auto& seq : sequences) {
        const json header = {{"format_version", kFormatVersion},
                             {"type", "video"},
                             {"video", seq.video_id},
                             {"width", seq.width},
                             {"height", seq.height},
                             {"num_frames", static_cast<int>(seq.frames.size())}};
        out += header.dump();
        out += '\n';
        for (const auto& f : seq.frames) {
            for (const auto& d : f.detections) {
                json emb = json::array();
                for (Eigen::Index i = 0; i < d.embedding.size(); ++i) {
                    emb.push_back(round9(d.embedding(i)));
                }
                json rec = {{"type", "detection"},
                            {"video", seq.video_id},
                            {"frame", f.frame},
                            {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}},
                            {"score", d.score},
                            {"embedding", std::move(emb)}};
                if (d.mask) {
                    rec["rle"] = rle_json(*d.mask);
                }
                out += rec.dump();
                out += '\n';
            }
        }
    }
    return out;
}

namespace {

using RValue = rapidjson::Value;

[[noreturn]] void schema(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::SchemaError, where + ": " + what);
}

const RValue& member(const RValue& obj, const char* key, const std::string& where) {
    const auto it = obj.FindMember(key);
    if (it == obj.MemberEnd()) {
        schema(where, std::string("missing field '") + key + "'");
    }
    return it->value;
}

int int_member(const RValue& obj, const char* key, const std::string& where) {
    const RValue& v = member(obj, key, where);
    if (!v.IsInt()) {
        schema(where, std::string("field '") + key + "' must be an integer");
    }
    return v.GetInt();
}

double number_member(const RValue& obj, const char* key, const std::string& where) {
    const RValue& v = member(obj, key, where);
    if (!v.IsNumber()) {
        schema(where, std::string("field '") + key + "' must be a number");
    }
    return v.GetDouble();
}

std::string string_member(const RValue& obj, const char* key, const std::string& where) {
    const RValue& v = member(obj, key, where);
    if (!v.IsString()) {
        schema(where, std::string("field '") + key + "' must be a string");
    }
    return {v.GetString(), v.GetStringLength()};
}

BinaryMask mask_member(const RValue& obj, int width, int height, const std::string& where) {
    std::vector<std::uint32_t> counts;
    if (const auto it = obj.FindMember("rle"); it != obj.MemberEnd()) {
        const RValue& rle = it->value;
        if (rle.IsString()) {
            std::istringstream in(std::string(rle.GetString(), rle.GetStringLength()));
            long long c = 0;
            while (in >> c) {
                if (c < 0) {
                    schema(where, "rle has a negative count");
                }
                counts.push_back(static_cast<std::uint32_t>(c));
            }
            if (!in.eof()) {
                throw Error(ErrorCode::ParseError, where + ": rle is not a list of integers");
            }
        } else if (rle.IsArray()) {
            counts.reserve(rle.Size());
            for (const auto& c : rle.GetArray()) {
                if (!c.IsUint()) {
                    schema(where, "rle must hold nonnegative integers");
                }
                counts.push_back(c.GetUint());
            }
        } else {
            schema(where, "rle must be an array or string");
        }
        try {
            return rle_decode(counts, width, height);
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
    const RValue& poly = member(obj, "polygon", where);
    if (!poly.IsArray()) {
        schema(where, "polygon must be an array of rings");
    }
    std::vector<std::vector<double>> rings;
    for (const auto& ring : poly.GetArray()) {
        if (!ring.IsArray()) {
            schema(where, "polygon ring must be an array");
        }
        std::vector<double> coords;
        for (const auto& c : ring.GetArray()) {
            if (!c.IsNumber()) {
                schema(where, "polygon holds a non-number");
            }
            coords.push_back(c.GetDouble());
        }
        rings.push_back(std::move(coords));
    }
    try {
        return rasterize_polygons(rings, width, height);
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
    }
}

}  // namespace

// Detection files are large (a 256-d embedding per record), so records are
// read with RapidJSON rather than the DOM used by the other formats.
std::vector<DetectionSequence> parse_detections(std::string_view text, std::string_view source,
                                                int embedding_dim) {
    std::vector<DetectionSequence> out;
    std::map<std::string, std::size_t, std::less<>> index;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::string buffer;
    rapidjson::Document rec;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        buffer.assign(line);
        rec.Parse<rapidjson::kParseFullPrecisionFlag>(buffer.c_str(), buffer.size());
        if (rec.HasParseError()) {
            throw Error(ErrorCode::ParseError, where + ":" + std::to_string(rec.GetErrorOffset() + 1) +
                                                   ": " + rapidjson::GetParseError_En(rec.GetParseError()));
        }
        if (!rec.IsObject()) {
            schema(where, "record is not an object");
        }
        const std::string type = string_member(rec, "type", where);
        const std::string video = string_member(rec, "video", where);
        if (type == "video") {
            const int version = int_member(rec, "format_version", where);
            if (version != kFormatVersion) {
                schema(where, "unsupported format_version " + std::to_string(version));
            }
            if (index.contains(video)) {
                schema(where, "duplicate video '" + video + "'");
            }
            DetectionSequence seq;
            seq.video_id = video;
            seq.width = int_member(rec, "width", where);
            seq.height = int_member(rec, "height", where);
            const int n = int_member(rec, "num_frames", where);
            if (seq.width < 1 || seq.height < 1 || n < 0) {
                schema(where, "invalid video header");
            }
            for (int f = 0; f < n; ++f) {
                seq.frames.push_back({f, {}});
            }
            index.emplace(video, out.size());
            out.push_back(std::move(seq));
            continue;
        }
        if (type != "detection") {
            schema(where, "unknown record type '" + type + "'");
        }
        const auto it = index.find(video);
        if (it == index.end()) {
            schema(where, "detection for undeclared video '" + video + "'");
        }
        DetectionSequence& seq = out[it->second];
        const int frame = int_member(rec, "frame", where);
        if (frame < 0 || frame >= static_cast<int>(seq.frames.size())) {
            schema(where, "frame " + std::to_string(frame) + " outside the video");
        }
        Detection d;
        d.frame = frame;
        const RValue& box = member(rec, "box", where);
        if (!box.IsArray() || box.Size() != 4 || !box[0].IsNumber() || !box[1].IsNumber() ||
            !box[2].IsNumber() || !box[3].IsNumber()) {
            schema(where, "box must be 4 numbers");
        }
        d.box = {box[0].GetDouble(), box[1].GetDouble(), box[2].GetDouble(), box[3].GetDouble()};
        if (!d.box.valid()) {
            schema(where, "box has non-positive extent");
        }
        d.score = number_member(rec, "score", where);
        if (!(d.score >= 0.0 && d.score <= 1.0)) {
            schema(where, "score must lie in [0, 1]");
        }
        const RValue& emb = member(rec, "embedding", where);
        if (!emb.IsArray() || static_cast<int>(emb.Size()) != embedding_dim) {
            schema(where, "embedding must have " + std::to_string(embedding_dim) + " components");
        }
        d.embedding.resize(embedding_dim);
        for (int i = 0; i < embedding_dim; ++i) {
            const RValue& c = emb[static_cast<rapidjson::SizeType>(i)];
            if (!c.IsNumber()) {
                schema(where, "embedding holds a non-number");
            }
            d.embedding(i) = c.GetDouble();
        }
        if (rec.HasMember("rle") || rec.HasMember("polygon")) {
            d.mask = mask_member(rec, seq.width, seq.height, where);
        }
        seq.frames[static_cast<std::size_t>(frame)].detections.push_back(std::move(d));
    }
    return out;
}

void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionSequence> sequences) {
    write_file(path, serialize_detections(sequences));
}

std::vector<DetectionSequence> load_detections(const std::filesystem::path& path,
                                               int embedding_dim) {
    return parse_detections(read_file(path), path.string(), embedding_dim);
}

}  // namespace hvis
