#include "quadloco/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quadloco {

namespace {

Vec3 moving_offset(const Platform& p, double t) {
    return p.travel * (0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t / p.period + p.phase)));
}

Box box_at(const Vec3& position, const Vec3& half) { return {position - half, position + half}; }

void add_touch(ContactReport& c, int i) {
    auto it = std::lower_bound(c.touched.begin(), c.touched.end(), i);
    if (it == c.touched.end() || *it != i) c.touched.insert(it, i);
}

bool blocked_anywhere(const World& world, const Box& box) {
    for (std::size_t i = 0; i < world.platforms.size(); ++i) {
        if (world.solid(i) && overlaps(box, world.platform_box(i))) return true;
    }
    return false;
}

} // namespace

World::World(LevelSpec lvl) : level(std::move(lvl)), platforms(level.platforms.size()) {
    reset_platforms();
}

void World::reset_platforms() {
    for (std::size_t i = 0; i < platforms.size(); ++i) {
        PlatformState fresh;
        if (level.platforms[i].kind == PlatformKind::Moving) fresh.offset = moving_offset(level.platforms[i], time);
        platforms[i] = fresh;
    }
}

double World::thinnest_solid_extent() const {
    double thin = INFINITY;
    for (std::size_t i = 0; i < platforms.size(); ++i) {
        if (!solid(i)) continue;
        const Vec3 s = level.platforms[i].box.size();
        thin = std::min({thin, s.x, s.y, s.z});
    }
    return thin;
}

CollisionResult resolve_collisions(const World& world, const AvatarState& avatar, const Vec3& attempted_move,
                                   bool allow_step_up, double max_step_up) {
    CollisionResult r;
    Vec3 pos = avatar.position;
    const Vec3 he = avatar.half_extents;
    const std::size_t n = world.platforms.size();

    if (attempted_move.y != 0.0) {
        pos.y += attempted_move.y;
        for (int pass = 0; pass < 4; ++pass) {
            bool hit = false;
            double target = pos.y;
            for (std::size_t i = 0; i < n; ++i) {
                if (!world.solid(i)) continue;
                const Box pb = world.platform_box(i);
                if (!overlaps(box_at(pos, he), pb)) continue;
                hit = true;
                add_touch(r.contacts, static_cast<int>(i));
                if (attempted_move.y < 0.0) {
                    if (pb.max.y + he.y >= target) {
                        target = pb.max.y + he.y;
                        r.contacts.support = static_cast<int>(i);
                    }
                } else {
                    target = std::min(target, pb.min.y - he.y);
                }
            }
            if (!hit) break;
            pos.y = target;
            r.blocked_y = true;
            if (attempted_move.y < 0.0) r.contacts.ground = true;
            else r.contacts.ceiling = true;
        }
    }

    auto horizontal = [&](double Vec3::*axis, double half, double delta, bool& blocked, bool step_up) {
        if (delta == 0.0) return;
        pos.*axis += delta;
        for (int pass = 0; pass < 4; ++pass) {
            bool hit = false;
            double limit = pos.*axis;
            double step_top = -INFINITY;
            int step_platform = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (!world.solid(i)) continue;
                const Box pb = world.platform_box(i);
                if (!overlaps(box_at(pos, he), pb)) continue;
                hit = true;
                add_touch(r.contacts, static_cast<int>(i));
                limit = delta > 0.0 ? std::min(limit, pb.min.*axis - half) : std::max(limit, pb.max.*axis + half);
                if (pb.max.y > step_top) {
                    step_top = pb.max.y;
                    step_platform = static_cast<int>(i);
                }
            }
            if (!hit) return;
            if (step_up) {
                const double rise = step_top + he.y - pos.y;
                Vec3 lifted = pos;
                lifted.y = step_top + he.y;
                if (rise > 0.0 && rise <= max_step_up + 1e-9 && !blocked_anywhere(world, box_at(lifted, he))) {
                    pos = lifted;
                    r.contacts.ground = true;
                    r.contacts.support = step_platform;
                    return;
                }
            }
            pos.*axis = limit;
            blocked = true;
            r.contacts.wall = true;
        }
    };
    horizontal(&Vec3::z, he.z, attempted_move.z, r.blocked_z, allow_step_up);
    horizontal(&Vec3::x, he.x, attempted_move.x, r.blocked_x, false);

    r.position = pos;
    return r;
}

std::vector<int> update_platforms(World& world, double dt, const ContactReport& contacts) {
    for (int i : contacts.touched) {
        PlatformState& s = world.platforms[static_cast<std::size_t>(i)];
        if (world.level.platforms[static_cast<std::size_t>(i)].kind == PlatformKind::Falling && !s.first_contact)
            s.first_contact = world.time;
    }
    const double t = world.time + dt;
    std::vector<int> collapsed;
    for (std::size_t i = 0; i < world.platforms.size(); ++i) {
        const Platform& p = world.level.platforms[i];
        PlatformState& s = world.platforms[i];
        s.last_delta = {};
        if (p.kind == PlatformKind::Moving) {
            const Vec3 next = moving_offset(p, t);
            s.last_delta = next - s.offset;
            s.offset = next;
        } else if (p.kind == PlatformKind::Falling && s.solid && s.first_contact &&
                   t >= *s.first_contact + p.collapse_delay - 1e-9) {
            s.solid = false;
            collapsed.push_back(static_cast<int>(i));
        }
    }
    world.time = t;
    return collapsed;
}

Vec3 depenetrate(const World& world, const AvatarState& avatar) {
    Vec3 pos = avatar.position;
    const Vec3 he = avatar.half_extents;
    for (int pass = 0; pass < 4; ++pass) {
        bool moved = false;
        for (std::size_t i = 0; i < world.platforms.size(); ++i) {
            if (!world.solid(i)) continue;
            const Box pb = world.platform_box(i);
            const Box ab = box_at(pos, he);
            if (!overlaps(ab, pb)) continue;
            const double up = pb.max.y - ab.min.y;
            const double down = ab.max.y - pb.min.y;
            const double fwd = pb.max.z - ab.min.z;
            const double back = ab.max.z - pb.min.z;
            const double best = std::min({up, down, fwd, back});
            if (best == up) pos.y += up;
            else if (best == down) pos.y -= down;
            else if (best == fwd) pos.z += fwd;
            else pos.z -= back;
            moved = true;
        }
        if (!moved) break;
    }
    return pos;
}

StepResult step(const World& world, const AvatarState& avatar, const MapperOutput& output,
                const PhysicsParams& params, double dt, double now) {
    StepResult r;
    AvatarState a = avatar;
    const std::size_t n = world.platforms.size();

    // Ride along with whatever carried us last tick.
    if (a.grounded && a.support >= 0 && static_cast<std::size_t>(a.support) < n &&
        world.solid(static_cast<std::size_t>(a.support))) {
        a.position += world.platforms[static_cast<std::size_t>(a.support)].last_delta;
    }
    a.position = depenetrate(world, a);

    Vec3 v = a.velocity;
    if (output.jump) {
        v = {0.0, output.jump->vy, output.jump->vz};
    } else if (output.locomotion) {
        v.x = output.locomotion->x;
        v.z = output.locomotion->z;
    } else if (a.grounded) {
        v.x *= params.friction;
        v.z *= params.friction;
    }
    r.pre_integration_velocity = v;

    v.y -= params.gravity * dt;

    Vec3 move = v * dt;
    const double thin = world.thinnest_solid_extent();
    int substeps = 1;
    if (std::isfinite(thin) && thin > 0.0) {
        substeps = static_cast<int>(std::ceil(move.norm() / (0.5 * thin)));
        substeps = std::clamp(substeps, 1, params.max_substeps);
    }
    const Vec3 sub = move / static_cast<double>(substeps);
    Vec3 delta = sub;
    ContactReport contacts;
    for (int s = 0; s < substeps; ++s) {
        const CollisionResult c = resolve_collisions(world, a, delta, avatar.grounded, params.max_step_up);
        a.position = c.position;
        for (int i : c.contacts.touched) add_touch(contacts, i);
        contacts.ceiling = contacts.ceiling || c.contacts.ceiling;
        contacts.wall = contacts.wall || c.contacts.wall;
        if (c.contacts.ground) {
            contacts.ground = true;
            contacts.support = c.contacts.support;
        }
        if (c.blocked_y) {
            v.y = 0.0;
            delta.y = 0.0;
        }
        if (c.blocked_z) {
            v.z = 0.0;
            delta.z = 0.0;
        }
        if (c.blocked_x) {
            v.x = 0.0;
            delta.x = 0.0;
        }
    }

    a.velocity = v;
    a.grounded = contacts.ground;
    a.support = contacts.ground ? contacts.support : -1;
    if (a.grounded) a.last_grounded = now;

    r.avatar = a;
    r.contacts = std::move(contacts);
    r.substeps = substeps;
    return r;
}

} // namespace quadloco
