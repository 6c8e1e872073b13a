#include "semclip/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace semclip {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'P', 'K'};
constexpr uint32_t kVersion = 1;

const char* const kArrayOrder[] = {"token_table", "text_w1", "text_b1", "text_w2",
                                   "text_b2",     "image_w", "projection_V", "theta"};
constexpr int kArrayCount = 8;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw DataError("cannot open checkpoint for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }
    void u8(uint8_t v) { bytes(&v, 1); }
    void u16(uint16_t v) { bytes(&v, 2); }
    void u32(uint32_t v) { bytes(&v, 4); }
    void u64(uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void array(const char* name, const Tensor& t) {
        const uint16_t len = static_cast<uint16_t>(std::strlen(name));
        u16(len);
        bytes(name, len);
        u64(static_cast<uint64_t>(t.numel()));
        for (double v : t.values()) {
            const float f = static_cast<float>(v);
            bytes(&f, 4);
        }
    }
    void finish() {
        out_.flush();
        if (!out_) throw DataError("checkpoint write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw CheckpointError("cannot open checkpoint: " + path);
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            fail("unexpected end of file");
        }
        offset_ += n;
    }
    uint8_t u8() { uint8_t v; bytes(&v, 1); return v; }
    uint16_t u16() { uint16_t v; bytes(&v, 2); return v; }
    uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
    uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    [[noreturn]] void fail(const std::string& what) const {
        throw CheckpointError(path_ + ": " + what + " at byte offset " +
                              std::to_string(offset_));
    }
    Tensor array(const char* want_name, std::vector<int> shape, bool requires_grad) {
        const uint16_t len = u16();
        std::string name(len, '\0');
        bytes(name.data(), len);
        if (name != want_name) {
            fail("expected array \"" + std::string(want_name) + "\", found \"" + name + "\"");
        }
        const uint64_t count = u64();
        Tensor t = Tensor::zeros(shape, requires_grad);
        if (count != static_cast<uint64_t>(t.numel())) {
            fail("array \"" + name + "\" has " + std::to_string(count) + " elements, expected " +
                 std::to_string(t.numel()));
        }
        for (double& v : t.values()) {
            float f;
            bytes(&f, 4);
            v = static_cast<double>(f);
        }
        return t;
    }
    std::size_t offset() const { return offset_; }
    bool at_eof() {
        in_.peek();
        return in_.eof();
    }

private:
    std::ifstream in_;
    std::string path_;
    std::size_t offset_ = 0;
};

}  // namespace

void save_checkpoint(const Model& m, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<uint32_t>(m.d));
    w.u32(static_cast<uint32_t>(m.d_tok));
    w.u32(static_cast<uint32_t>(m.bank.n));
    w.u8(m.bank.normalize ? 1 : 0);
    w.u8(m.bank.learnable ? 1 : 0);
    w.u8(0);
    w.u8(0);
    w.u64(m.vocab_hash);
    w.u64(m.seed);
    w.f64(m.temperature.tau_max);
    w.f64(m.image.noise_sigma);
    w.u32(kArrayCount);
    w.array(kArrayOrder[0], m.text.token_table);
    w.array(kArrayOrder[1], m.text.w1);
    w.array(kArrayOrder[2], m.text.b1);
    w.array(kArrayOrder[3], m.text.w2);
    w.array(kArrayOrder[4], m.text.b2);
    w.array(kArrayOrder[5], m.image.w_img);
    w.array(kArrayOrder[6], m.bank.v);
    w.array(kArrayOrder[7], m.temperature.theta);
    w.finish();
}

Model load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) r.fail("bad magic");
    const uint32_t version = r.u32();
    if (version != kVersion) r.fail("unsupported version " + std::to_string(version));

    Model m;
    m.d = static_cast<int>(r.u32());
    m.d_tok = static_cast<int>(r.u32());
    const int n = static_cast<int>(r.u32());
    const bool normalize = r.u8() != 0;
    const bool learnable = r.u8() != 0;
    r.u8();
    r.u8();
    m.vocab_hash = r.u64();
    m.seed = r.u64();
    const double tau_max = r.f64();
    const double sigma = r.f64();
    if (m.d <= 0 || m.d_tok <= 0 || n <= 0 || n >= m.d) r.fail("implausible header dimensions");
    const uint32_t arrays = r.u32();
    if (arrays != kArrayCount) r.fail("expected " + std::to_string(kArrayCount) + " arrays");

    const Vocabulary vocab;
    const int d_hidden = 2 * m.d;
    m.text.token_table = r.array(kArrayOrder[0], {vocab.size(), m.d_tok}, true);
    m.text.w1 = r.array(kArrayOrder[1], {m.d_tok, d_hidden}, true);
    m.text.b1 = r.array(kArrayOrder[2], {d_hidden}, true);
    m.text.w2 = r.array(kArrayOrder[3], {d_hidden, m.d}, true);
    m.text.b2 = r.array(kArrayOrder[4], {m.d}, true);
    m.image.w_img = r.array(kArrayOrder[5], {kSceneFeatureDim, m.d}, false);
    m.image.noise_sigma = sigma;
    m.bank.v = r.array(kArrayOrder[6], {m.d, n}, learnable);
    m.bank.n = n;
    m.bank.normalize = normalize;
    m.bank.learnable = learnable;
    m.bank.seed = m.seed;
    Tensor theta = r.array(kArrayOrder[7], {}, true);
    m.temperature.theta = theta;
    m.temperature.tau_max = tau_max;
    if (!r.at_eof()) r.fail("trailing bytes");
    return m;
}

}  // namespace semclip
