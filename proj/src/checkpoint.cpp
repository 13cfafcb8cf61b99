#include <hivecote/checkpoint.hpp>
#include <hivecote/hive_cote.hpp>
#include <hivecote/registry.hpp>

#include <fstream>
#include <sstream>

namespace hivecote {

  namespace {

    constexpr char magic[6] = {'H', 'C', 'C', 'K', 'P', 'T'};

    std::uint64_t fnv1a(const std::string& bytes) {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (const unsigned char b: bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
      return h;
    }

    void put_u64(std::string& out, std::uint64_t v) {
      for (int b = 0; b < 8; ++b) { out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU)); }
    }

    void put_u32(std::string& out, std::uint32_t v) {
      for (int b = 0; b < 4; ++b) { out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU)); }
    }

    class Reader {
    public:
      explicit Reader(const std::string& bytes) : bytes_(bytes) {}

      std::uint64_t u64() { return read_uint(8); }
      std::uint32_t u32() { return static_cast<std::uint32_t>(read_uint(4)); }

      std::string bytes(std::uint64_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
      }

      [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }

    private:
      void need(std::uint64_t n) const {
        if (n > bytes_.size() - pos_) { throw checkpoint_error("checkpoint is truncated"); }
      }

      std::uint64_t read_uint(int width) {
        need(static_cast<std::uint64_t>(width));
        std::uint64_t v = 0;
        for (int b = 0; b < width; ++b) {
          v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(b)])) << (8 * b);
        }
        pos_ += static_cast<std::size_t>(width);
        return v;
      }

      const std::string& bytes_;
      std::size_t pos_{0};
    };

  } // namespace

  std::string encode_checkpoint(const std::vector<CheckpointSection>& sections) {
    std::string out(magic, sizeof magic);
    put_u32(out, checkpoint_version);
    put_u32(out, static_cast<std::uint32_t>(sections.size()));
    for (const auto& s: sections) {
      put_u64(out, s.name.size());
      out += s.name;
      put_u64(out, s.payload.size());
      out += s.payload;
      put_u64(out, fnv1a(s.payload));
    }
    return out;
  }

  std::vector<CheckpointSection> decode_checkpoint(const std::string& bytes) {
    Reader in(bytes);
    if (in.bytes(sizeof magic) != std::string(magic, sizeof magic)) { throw checkpoint_error("not a checkpoint file"); }
    const auto version = in.u32();
    if (version != checkpoint_version) {
      throw checkpoint_error("checkpoint version " + std::to_string(version) + " is not supported (expected "
                             + std::to_string(checkpoint_version) + ")");
    }
    const auto count = in.u32();
    std::vector<CheckpointSection> sections;
    for (std::uint32_t k = 0; k < count; ++k) {
      CheckpointSection s;
      s.name = in.bytes(in.u64());
      s.payload = in.bytes(in.u64());
      if (in.u64() != fnv1a(s.payload)) { throw checkpoint_error("checksum mismatch in section '" + s.name + "'"); }
      sections.push_back(std::move(s));
    }
    if (!in.at_end()) { throw checkpoint_error("trailing bytes after the last section"); }
    return sections;
  }

  void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointSection>& sections) {
    if (path.has_parent_path()) { std::filesystem::create_directories(path.parent_path()); }
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) { throw checkpoint_error("cannot write " + tmp); }
      const auto bytes = encode_checkpoint(sections);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) { throw checkpoint_error("write failed for " + tmp); }
    }
    std::filesystem::rename(tmp, path);
  }

  std::vector<CheckpointSection> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw checkpoint_error("cannot open " + path.string()); }
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
  }

  void save_checkpoint(const Classifier& classifier, const std::filesystem::path& path) {
    if (const auto* hc = dynamic_cast<const HiveCote*>(&classifier)) {
      write_checkpoint(path, hc->checkpoint_sections());
      return;
    }
    std::ostringstream payload;
    classifier.save_state(payload);
    write_checkpoint(path, {{classifier.name(), payload.str()}});
  }

  std::unique_ptr<Classifier> load_checkpoint(const std::filesystem::path& path) {
    const auto sections = read_checkpoint(path);
    if (!sections.empty() && sections.front().name == "HC") {
      auto hc = std::make_unique<HiveCote>();
      hc->restore_sections(sections);
      return hc;
    }
    if (sections.size() != 1) { throw checkpoint_error("expected a single classifier section"); }
    auto classifier = make_classifier(sections.front().name);
    std::istringstream payload(sections.front().payload);
    classifier->load_state(payload);
    return classifier;
  }

} // namespace hivecote
