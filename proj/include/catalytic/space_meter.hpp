#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace catalytic {

// Accounts for the auxiliary bits a catalytic procedure keeps outside its
// catalytic tape. Registers are charged for as long as a Charge is alive.
class SpaceMeter {
 public:
  class Charge {
   public:
    Charge() = default;
    Charge(SpaceMeter* meter, std::string name, std::uint64_t bits)
        : meter_(meter), name_(std::move(name)), bits_(bits) {
      if (meter_) meter_->acquire(name_, bits_);
    }
    Charge(const Charge&) = delete;
    Charge& operator=(const Charge&) = delete;
    Charge(Charge&& o) noexcept : meter_(o.meter_), name_(std::move(o.name_)), bits_(o.bits_) {
      o.meter_ = nullptr;
    }
    Charge& operator=(Charge&& o) noexcept {
      if (this != &o) {
        release();
        meter_ = o.meter_;
        name_ = std::move(o.name_);
        bits_ = o.bits_;
        o.meter_ = nullptr;
      }
      return *this;
    }
    ~Charge() { release(); }

   private:
    void release() {
      if (meter_) meter_->release(name_, bits_);
      meter_ = nullptr;
    }
    SpaceMeter* meter_ = nullptr;
    std::string name_;
    std::uint64_t bits_ = 0;
  };

  std::uint64_t current() const { return current_; }
  std::uint64_t peak() const { return peak_; }

  // Largest simultaneous charge per register name.
  const std::map<std::string, std::uint64_t>& peak_by_name() const { return peak_by_name_; }

  void reset() {
    current_ = 0;
    peak_ = 0;
    live_.clear();
    peak_by_name_.clear();
  }

 private:
  void acquire(const std::string& name, std::uint64_t bits) {
    current_ += bits;
    if (current_ > peak_) peak_ = current_;
    auto& live = live_[name];
    live += bits;
    auto& best = peak_by_name_[name];
    if (live > best) best = live;
  }
  void release(const std::string& name, std::uint64_t bits) {
    current_ -= bits;
    live_[name] -= bits;
  }

  std::uint64_t current_ = 0;
  std::uint64_t peak_ = 0;
  std::map<std::string, std::uint64_t> live_;
  std::map<std::string, std::uint64_t> peak_by_name_;
};

// Charges `bits` to `meter` (if any) until the returned object dies.
[[nodiscard]] inline SpaceMeter::Charge charge(SpaceMeter* meter, std::string name,
                                               std::uint64_t bits) {
  return SpaceMeter::Charge(meter, std::move(name), bits);
}

}  // namespace catalytic
