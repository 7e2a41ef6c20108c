/*
 * Copyright 2026 The hams-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hams/nvme/engine.hpp"

#include "hams/error.hpp"

namespace hams::nvme {

NvmeEngine::NvmeEngine(nvdimm::PinnedRegion& pinned, Mode mode)
    : pinned_(pinned), mode_(mode) {
  if (pinned_.sq.size() < 2 || pinned_.cq.size() != pinned_.sq.size()) {
    raise(ErrorCode::kInvalidConfig, "SQ/CQ rings must have equal depth >= 2");
  }
  rebuild_index();
}

void NvmeEngine::rebuild_index() {
  by_cid_.clear();
  reserved_.clear();
  std::uint32_t max_cid = 0;
  bool any = false;
  for (std::uint32_t slot = 0; slot < pinned_.sq.size(); ++slot) {
    const auto& cmd = pinned_.sq[slot];
    if (!cmd.journal_tag) continue;
    by_cid_[cmd.cid] = slot;
    reserved_.insert(cmd.cid);
    max_cid = std::max<std::uint32_t>(max_cid, cmd.cid);
    any = true;
  }
  next_cid_ = any ? (max_cid + 1) % 65536 : 0;
}

NvmeCommand NvmeEngine::compose(Opcode opcode, std::uint64_t prp,
                                std::uint64_t lba, std::uint32_t length_bytes) {
  if (reserved_.size() >= 65536) {
    raise(ErrorCode::kCidExhausted, "every command id is in use");
  }
  while (reserved_.contains(static_cast<std::uint16_t>(next_cid_))) {
    next_cid_ = (next_cid_ + 1) % 65536;
  }
  NvmeCommand cmd;
  cmd.cid = static_cast<std::uint16_t>(next_cid_);
  next_cid_ = (next_cid_ + 1) % 65536;
  reserved_.insert(cmd.cid);
  cmd.opcode = opcode;
  cmd.prp = prp;
  cmd.lba = lba;
  cmd.length_bytes = length_bytes;
  cmd.fua = mode_ == Mode::kPersist && opcode == Opcode::kWrite;
  cmd.journal_tag = false;
  return cmd;
}

bool NvmeEngine::gate_open() const {
  return mode_ == Mode::kExtend || by_cid_.empty();
}

bool NvmeEngine::sq_full() const {
  const std::uint32_t d = depth();
  return (pinned_.sq_tail + 1) % d == pinned_.sq_head ||
         pinned_.sq[pinned_.sq_tail].journal_tag || by_cid_.size() + 1 >= d;
}

std::uint32_t NvmeEngine::submit(NvmeCommand cmd) {
  if (sq_full()) raise(ErrorCode::kQueueFull, "submission queue is full");
  if (by_cid_.contains(cmd.cid)) {
    raise(ErrorCode::kInvariantViolation, "cid already outstanding");
  }
  const std::uint32_t slot = pinned_.sq_tail;
  cmd.journal_tag = true;
  pinned_.sq[slot] = cmd;
  by_cid_[cmd.cid] = slot;
  reserved_.insert(cmd.cid);
  pinned_.sq_tail = (slot + 1) % depth();
  if (sq_doorbell_) sq_doorbell_();
  return slot;
}

std::optional<NvmeCommand> NvmeEngine::device_fetch() {
  if (pinned_.sq_head == pinned_.sq_tail) return std::nullopt;
  NvmeCommand cmd = pinned_.sq[pinned_.sq_head];
  pinned_.sq_head = (pinned_.sq_head + 1) % depth();
  return cmd;
}

void NvmeEngine::device_post_completion(std::uint16_t cid) {
  if (pending_completions() + 1 >= depth()) {
    raise(ErrorCode::kInvariantViolation, "completion queue overflow");
  }
  auto& cqe = pinned_.cq[pinned_.cq_tail];
  cqe.cid = cid;
  cqe.sq_head = static_cast<std::uint16_t>(pinned_.sq_head);
  cqe.status = 0;
  cqe.phase = !cqe.phase;
  pinned_.cq_tail = (pinned_.cq_tail + 1) % depth();
}

std::size_t NvmeEngine::pending_completions() const {
  return (pinned_.cq_tail + depth() - pinned_.cq_head) % depth();
}

NvmeCommand NvmeEngine::on_msi() {
  if (pending_completions() == 0) {
    raise(ErrorCode::kUnknownCid, "interrupt with an empty completion queue");
  }
  const CompletionEntry cqe = pinned_.cq[pinned_.cq_head];
  auto it = by_cid_.find(cqe.cid);
  if (it == by_cid_.end()) {
    raise(ErrorCode::kUnknownCid,
          "completion for cid " + std::to_string(cqe.cid) +
              " which is not outstanding");
  }
  NvmeCommand& slot = pinned_.sq[it->second];
  slot.journal_tag = false;
  NvmeCommand done = slot;
  by_cid_.erase(it);
  reserved_.erase(cqe.cid);
  pinned_.cq_head = (pinned_.cq_head + 1) % depth();
  if (cq_doorbell_) cq_doorbell_();
  return done;
}

std::vector<NvmeCommand> NvmeEngine::outstanding_commands() const {
  std::vector<NvmeCommand> out;
  const std::uint32_t d = depth();
  // The slot at sq_tail is the oldest position in the ring.
  for (std::uint32_t i = 0; i < d; ++i) {
    const auto& cmd = pinned_.sq[(pinned_.sq_tail + i) % d];
    if (cmd.journal_tag) out.push_back(cmd);
  }
  return out;
}

bool NvmeEngine::offsets_consistent() const {
  const std::uint32_t d = depth();
  std::size_t tagged = 0;
  for (const auto& cmd : pinned_.sq) tagged += cmd.journal_tag ? 1 : 0;
  return tagged == (pinned_.sq_tail + d - pinned_.cq_head) % d;
}

std::vector<NvmeCommand> NvmeEngine::recover() {
  std::vector<NvmeCommand> replay = outstanding_commands();
  for (auto& slot : pinned_.sq) slot = NvmeCommand{};
  for (auto& cqe : pinned_.cq) cqe = CompletionEntry{};
  pinned_.sq_head = pinned_.sq_tail = pinned_.cq_head = pinned_.cq_tail = 0;
  for (std::uint32_t i = 0; i < replay.size(); ++i) {
    pinned_.sq[i] = replay[i];
    pinned_.sq[i].journal_tag = true;
  }
  pinned_.sq_tail = static_cast<std::uint32_t>(replay.size()) % depth();
  rebuild_index();
  if (!replay.empty() && sq_doorbell_) sq_doorbell_();
  return replay;
}

}  // namespace hams::nvme
