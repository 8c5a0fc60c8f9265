#include "socnav/trace.hpp"

#include "socnav/errors.hpp"

#include <array>
#include <fstream>
#include <iterator>

namespace socnav {

namespace {

constexpr std::array<unsigned char, 8> kMagic = {'S', 'N', 'T', 'R', 'A', 'C', 'E', '1'};
constexpr std::uint32_t kVersion = 1;

enum RecordType : std::uint8_t {
  kHeader = 1,
  kTick = 2,
  kCollision = 3,
  kEnd = 4,
  kChecksum = 0xFF,
};

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  std::vector<unsigned char>& bytes() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : b_(b) {}
  bool done() const { return pos_ >= b_.size(); }
  std::size_t pos() const { return pos_; }
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw TraceCorrupt("trace truncated");
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  Reader sub(std::size_t n) {
    need(n);
    Reader r(b_.subspan(pos_, n));
    pos_ += n;
    return r;
  }

 private:
  std::span<const unsigned char> b_;
  std::size_t pos_ = 0;
};

void record(Writer& out, RecordType type, Writer& payload) {
  out.u32(static_cast<std::uint32_t>(payload.bytes().size() + 1));
  out.u8(type);
  auto& p = payload.bytes();
  out.bytes().insert(out.bytes().end(), p.begin(), p.end());
}

void put_tick(Writer& w, const TraceTick& t) {
  w.f64(t.time);
  w.f64(t.robot.x);
  w.f64(t.robot.y);
  w.f64(t.robot.theta);
  w.f64(t.robot_vx);
  w.f64(t.robot_vy);
  w.f64(t.robot_omega);
  w.f64(t.command.vx);
  w.f64(t.command.vy);
  w.f64(t.command.omega);
  w.f64(t.command.steering);
  w.u8(t.flags);
  w.u32(static_cast<std::uint32_t>(t.agents.size()));
  for (const auto& a : t.agents) {
    w.i32(a.id);
    w.f64(a.x);
    w.f64(a.y);
    w.f64(a.vx);
    w.f64(a.vy);
    w.f64(a.heading);
    w.u8(static_cast<std::uint8_t>(a.state));
  }
}

TraceTick get_tick(Reader& r) {
  TraceTick t;
  t.time = r.f64();
  t.robot.x = r.f64();
  t.robot.y = r.f64();
  t.robot.theta = r.f64();
  t.robot_vx = r.f64();
  t.robot_vy = r.f64();
  t.robot_omega = r.f64();
  t.command.vx = r.f64();
  t.command.vy = r.f64();
  t.command.omega = r.f64();
  t.command.steering = r.f64();
  t.flags = r.u8();
  const std::uint32_t n = r.u32();
  r.need(static_cast<std::size_t>(n) * 45);
  t.agents.resize(n);
  for (auto& a : t.agents) {
    a.id = r.i32();
    a.x = r.f64();
    a.y = r.f64();
    a.vx = r.f64();
    a.vy = r.f64();
    a.heading = r.f64();
    const std::uint8_t s = r.u8();
    if (s >= kSocialStateCount) throw TraceCorrupt("bad social state");
    a.state = static_cast<SocialState>(s);
  }
  return t;
}

}  // namespace

std::string_view end_reason_name(EndReason r) {
  switch (r) {
    case EndReason::GoalReached: return "goal_reached";
    case EndReason::Timeout: return "timeout";
    case EndReason::CollisionAbort: return "collision_abort";
    case EndReason::Running: return "running";
  }
  return "unknown";
}

std::uint64_t EpisodeTrace::trajectory_hash() const {
  Writer w;
  for (const auto& t : ticks) put_tick(w, t);
  for (const auto& c : collisions) {
    w.f64(c.time);
    w.u8(static_cast<std::uint8_t>(c.kind));
    w.i32(c.other);
  }
  w.u8(static_cast<std::uint8_t>(end));
  return fnv1a(w.bytes());
}

std::vector<unsigned char> encode_trace(const EpisodeTrace& trace) {
  Writer out;
  out.bytes().insert(out.bytes().end(), kMagic.begin(), kMagic.end());
  out.u32(kVersion);
  {
    const TraceHeader& h = trace.header;
    Writer p;
    p.str(h.stage);
    p.str(h.planner);
    p.str(h.robot);
    p.i64(h.episode);
    p.u64(h.seed);
    p.f64(h.dt);
    p.f64(h.start.x());
    p.f64(h.start.y());
    p.f64(h.goal.x());
    p.f64(h.goal.y());
    p.f64(h.goal_tolerance);
    p.f64(h.footprint_radius);
    p.f64(h.pedestrian_radius);
    p.f64(h.timeout);
    p.str(h.config_hash);
    record(out, kHeader, p);
  }
  for (const auto& t : trace.ticks) {
    Writer p;
    put_tick(p, t);
    record(out, kTick, p);
  }
  for (const auto& c : trace.collisions) {
    Writer p;
    p.f64(c.time);
    p.u8(static_cast<std::uint8_t>(c.kind));
    p.i32(c.other);
    record(out, kCollision, p);
  }
  {
    Writer p;
    p.u8(static_cast<std::uint8_t>(trace.end));
    record(out, kEnd, p);
  }
  const std::uint64_t sum = fnv1a(out.bytes());
  Writer p;
  p.u64(sum);
  record(out, kChecksum, p);
  return std::move(out.bytes());
}

EpisodeTrace decode_trace(std::span<const unsigned char> bytes) {
  if (bytes.size() < kMagic.size() + 4 ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw TraceCorrupt("not a trace file");
  }
  Reader r(bytes.subspan(kMagic.size()));
  if (r.u32() != kVersion) throw TraceCorrupt("unsupported trace version");
  EpisodeTrace trace;
  bool have_header = false, have_end = false, have_sum = false;
  while (!r.done()) {
    const std::size_t record_start = kMagic.size() + r.pos();
    const std::uint32_t len = r.u32();
    if (len == 0) throw TraceCorrupt("empty record");
    Reader rec = r.sub(len);
    const std::uint8_t type = rec.u8();
    switch (type) {
      case kHeader: {
        TraceHeader& h = trace.header;
        h.stage = rec.str();
        h.planner = rec.str();
        h.robot = rec.str();
        h.episode = rec.i64();
        h.seed = rec.u64();
        h.dt = rec.f64();
        h.start.x() = rec.f64();
        h.start.y() = rec.f64();
        h.goal.x() = rec.f64();
        h.goal.y() = rec.f64();
        h.goal_tolerance = rec.f64();
        h.footprint_radius = rec.f64();
        h.pedestrian_radius = rec.f64();
        h.timeout = rec.f64();
        h.config_hash = rec.str();
        have_header = true;
        break;
      }
      case kTick:
        trace.ticks.push_back(get_tick(rec));
        break;
      case kCollision: {
        CollisionEvent c;
        c.time = rec.f64();
        c.kind = static_cast<CollisionKind>(rec.u8());
        c.other = rec.i32();
        trace.collisions.push_back(c);
        break;
      }
      case kEnd:
        trace.end = static_cast<EndReason>(rec.u8());
        have_end = true;
        break;
      case kChecksum: {
        const std::uint64_t want = rec.u64();
        if (fnv1a(bytes.first(record_start)) != want) throw TraceCorrupt("checksum mismatch");
        have_sum = true;
        if (!r.done()) throw TraceCorrupt("data after checksum");
        break;
      }
      default:
        throw TraceCorrupt("unknown record type " + std::to_string(type));
    }
    if (!rec.done()) throw TraceCorrupt("record length mismatch");
  }
  if (!have_sum) throw TraceCorrupt("missing checksum trailer");
  if (!have_header || !have_end) throw TraceCorrupt("missing header or end record");
  return trace;
}

void write_trace(const EpisodeTrace& trace, const std::filesystem::path& path) {
  const auto bytes = encode_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

EpisodeTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

std::vector<CollisionEvent> CollisionMonitor::update(double time,
                                                     const std::vector<Contact>& contacts) {
  std::vector<CollisionEvent> events;
  for (auto& [key, st] : status_) {
    (void)key;
    if (st.touching) {
      st.touching = false;
      st.separated_since = time;
    }
  }
  for (const auto& c : contacts) {
    Status& st = status_[{c.kind, c.other}];
    if (!st.armed && !st.touching && time - st.separated_since >= rearm_) st.armed = true;
    st.touching = true;
    if (st.armed) {
      events.push_back({time, c.kind, c.other});
      st.armed = false;
    }
  }
  for (auto& [key, st] : status_) {
    (void)key;
    if (!st.touching && !st.armed && time - st.separated_since >= rearm_) st.armed = true;
  }
  return events;
}

}  // namespace socnav
