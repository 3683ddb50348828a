#include "s2/s2tf.hpp"

#include "s2/errors.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace s2::s2tf {

namespace {

constexpr std::size_t kHeaderSize = 12;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

struct Cursor {
    std::span<const std::byte> bytes;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (bytes.size() - pos < n) throw FormatError(std::string("s2tf: truncated while reading ") + what);
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(std::to_integer<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }

    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(std::to_integer<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }

    std::string str(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes.data()) + pos, n);
        pos += n;
        return s;
    }
};

float f32_from_le(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(std::to_integer<unsigned char>(p[i])) << (8 * i);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

void f32_to_le(std::vector<std::byte>& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}

} // namespace

std::map<std::string, Tensor> read(std::span<const std::byte> bytes) {
    Cursor cur{bytes};
    const std::string magic = cur.str(4, "magic");
    if (magic != "S2TF") throw FormatError("s2tf: bad magic");
    const std::uint32_t version = cur.u32("version");
    if (version != kVersion) throw FormatError("s2tf: unsupported version " + std::to_string(version));
    const std::uint32_t count = cur.u32("tensor count");

    struct Record {
        std::string name;
        std::vector<std::int64_t> dims;
        std::uint64_t offset;
        std::uint64_t byte_size;
    };
    std::vector<Record> records;
    records.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Record rec;
        const std::uint32_t name_len = cur.u32("name length");
        rec.name = cur.str(name_len, "name");
        const std::uint32_t rank = cur.u32("rank");
        if (rank < 1 || rank > 4) throw FormatError("s2tf: rank must be 1..4, got " + std::to_string(rank));
        std::uint64_t volume = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            const std::uint64_t d = cur.u64("dim");
            if (d == 0 || d > (1ull << 32)) throw FormatError("s2tf: bad dimension");
            volume *= d;
            if (volume > (1ull << 34)) throw FormatError("s2tf: tensor too large");
            rec.dims.push_back(static_cast<std::int64_t>(d));
        }
        const std::uint32_t dtype = cur.u32("dtype");
        if (dtype != 0) throw FormatError("s2tf: unsupported dtype " + std::to_string(dtype));
        rec.offset = cur.u64("payload offset");
        rec.byte_size = volume * 4;
        if (rec.offset % 4 != 0) throw FormatError("s2tf: payload offset for '" + rec.name + "' is not 4-byte aligned");
        if (rec.offset > bytes.size() || rec.byte_size > bytes.size() - rec.offset) {
            throw FormatError("s2tf: payload for '" + rec.name + "' points past end of file");
        }
        records.push_back(std::move(rec));
    }

    // Payloads must not overlap each other.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    spans.reserve(records.size());
    for (const Record& rec : records) spans.emplace_back(rec.offset, rec.byte_size);
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i - 1].first + spans[i - 1].second > spans[i].first) {
            throw FormatError("s2tf: overlapping tensor payloads");
        }
    }

    std::map<std::string, Tensor> out;
    for (Record& rec : records) {
        std::vector<float> values(rec.byte_size / 4);
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = f32_from_le(bytes.data() + rec.offset + i * 4);
        }
        if (!out.emplace(rec.name, Tensor(std::move(rec.dims), std::move(values))).second) {
            throw FormatError("s2tf: duplicate tensor name '" + rec.name + "'");
        }
    }
    return out;
}

std::vector<std::byte> write(const std::map<std::string, Tensor>& tensors) {
    // Record region size is computable up front; payloads start at the
    // first 4-byte boundary after it. std::map iteration already gives
    // ascending byte order over names.
    std::size_t record_bytes = 0;
    for (const auto& [name, tensor] : tensors) {
        record_bytes += 4 + name.size() + 4 + static_cast<std::size_t>(tensor.rank()) * 8 + 4 + 8;
    }
    std::size_t payload_start = kHeaderSize + record_bytes;
    payload_start = (payload_start + 3) / 4 * 4;

    std::vector<std::byte> out;
    out.reserve(payload_start);
    out.push_back(std::byte{'S'});
    out.push_back(std::byte{'2'});
    out.push_back(std::byte{'T'});
    out.push_back(std::byte{'F'});
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));

    std::uint64_t offset = payload_start;
    for (const auto& [name, tensor] : tensors) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        for (char c : name) out.push_back(static_cast<std::byte>(c));
        put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (std::int64_t d : tensor.dims()) put_u64(out, static_cast<std::uint64_t>(d));
        put_u32(out, 0); // dtype f32
        put_u64(out, offset);
        offset += static_cast<std::uint64_t>(tensor.size()) * 4;
    }
    while (out.size() < payload_start) out.push_back(std::byte{0});
    for (const auto& [name, tensor] : tensors) {
        for (float v : tensor.data()) f32_to_le(out, v);
    }
    return out;
}

std::map<std::string, Tensor> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open s2tf file '" + path.string() + "'");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read(std::span<const std::byte>(reinterpret_cast<const std::byte*>(raw.data()), raw.size()));
}

void write_file(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors) {
    const std::vector<std::byte> bytes = write(tensors);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write s2tf file '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

} // namespace s2::s2tf
