#include "lrrl/rl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "lrrl/rl/replay.hpp"

namespace lrrl::rl {

double EpsilonSchedule::at(std::uint64_t step) const {
    if (decay_steps == 0 || step >= decay_steps) return final;
    const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return initial + (final - initial) * frac;
}

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
    if (tau < lambda) throw std::invalid_argument("tau must be >= lambda");
    if (kappa.value < 1) throw std::invalid_argument("kappa must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (replay_capacity < 1) throw std::invalid_argument("replay_capacity must be >= 1");
    if (replay_start < 1) throw std::invalid_argument("replay_start must be >= 1");
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(epsilon.initial) || !unit(epsilon.final)) throw std::invalid_argument("epsilon values must lie in [0, 1]");
    if (reward_clip && !(reward_clip->first <= reward_clip->second))
        throw std::invalid_argument("reward_clip lower bound exceeds upper bound");
    for (auto h : hidden)
        if (h == 0) throw std::invalid_argument("hidden layer widths must be positive");
    validate_arms(arms);
    optimizer.validate();
}

TrainResult train(Environment& env, const TrainConfig& cfg, const TrainHooks& hooks) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

    Rng init_rng = make_stream(cfg.seed, 1);
    Rng agent_rng = make_stream(cfg.seed, 2);
    Rng bandit_rng = make_stream(cfg.seed, 3);

    std::vector<std::size_t> dims;
    dims.push_back(env.state_dim());
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(env.action_count());

    TrainResult result;
    QNetwork learner = QNetwork::initialized(dims, init_rng);
    QNetwork target = learner;
    optim::OptimizerState opt(cfg.optimizer, learner.params().size());
    ReplayBuffer replay(cfg.replay_capacity);
    bandit::ArmController controller(cfg.arms.size(), cfg.bandit, bandit_rng);

    double window_reward = 0.0;        // R
    std::uint64_t window_steps = 0;    // C
    std::uint64_t window_episodes = 0;
    std::uint64_t total_steps = 0;
    std::uint64_t last_sync = 0;
    double last_return = 0.0;

    auto rate_in_force = [&] { return cfg.arms[controller.current_arm()].effective_rate(controller.round()); };

    for (std::size_t episode = 0; episode < cfg.episodes && !result.diverged; ++episode) {
        auto state = env.reset();
        EpisodeRecord ep;
        ep.episode = episode;
        double discount = 1.0;

        for (std::size_t t = 0; t < cfg.horizon; ++t) {
            const double eps = cfg.epsilon.at(total_steps);
            const std::size_t action = act_epsilon_greedy(learner, state, eps, agent_rng);
            StepResult step = env.step(action);

            double stored_reward = step.reward;
            if (cfg.reward_clip) stored_reward = std::clamp(stored_reward, cfg.reward_clip->first, cfg.reward_clip->second);
            replay.push({state, action, stored_reward, step.state, step.terminal});

            window_reward += step.reward;
            window_steps += 1;
            total_steps += 1;
            ep.length += 1;
            ep.reward_sum += step.reward;
            ep.discounted_return += discount * step.reward;
            discount *= cfg.gamma;

            const bool episode_over = step.terminal || t + 1 == cfg.horizon;
            if (episode_over) {
                window_episodes += 1;
                last_return = ep.discounted_return;
            }

            if (window_steps % cfg.lambda == 0) {
                const bool kappa_met = cfg.kappa.unit == KappaUnit::Steps ? window_steps >= cfg.kappa.value
                                                                          : window_episodes >= cfg.kappa.value;
                if (kappa_met) {
                    const double credited_rate = rate_in_force();
                    const double feedback = window_reward / static_cast<double>(window_steps);
                    const auto outcome = controller.observe(feedback, bandit_rng);
                    BanditRoundRecord rec;
                    rec.round = outcome.round;
                    rec.env_step = total_steps;
                    rec.episode = episode;
                    rec.credited_arm = outcome.credited_arm;
                    rec.credited_rate = credited_rate;
                    rec.next_arm = outcome.next_arm;
                    rec.next_rate = rate_in_force();
                    rec.feedback = feedback;
                    rec.improvement = outcome.improvement;
                    rec.last_episode_return = last_return;
                    rec.wall_seconds = elapsed();
                    result.rounds.push_back(rec);
                    window_reward = 0.0;
                    window_steps = 0;
                    window_episodes = 0;
                }

                if (replay.size() >= cfg.replay_start) {
                    const auto batch = replay.sample(cfg.batch_size, agent_rng);
                    auto lg = td_loss_and_grad(learner, target, batch, cfg.gamma);
                    bool ok = lg.grads.all_finite() && std::isfinite(lg.loss);
                    if (ok) {
                        optim::step(opt, learner.params().span(), lg.grads.span(), rate_in_force());
                        ok = learner.params().all_finite();
                    }
                    result.learner_updates += 1;
                    if (!ok) {
                        result.diverged = true;
                        result.failure = "non-finite parameters after learner update at env step " +
                                         std::to_string(total_steps);
                    }
                }

                bool synced = false;
                if (!result.diverged && total_steps - last_sync >= cfg.tau) {
                    target.params().values = learner.params().values;
                    last_sync = total_steps;
                    result.target_syncs += 1;
                    synced = true;
                }
                if (hooks.on_learner_step) hooks.on_learner_step({total_steps, learner, target, synced});
            }

            state = std::move(step.state);
            if (episode_over || result.diverged) break;
        }

        ep.env_steps = total_steps;
        ep.arm = controller.current_arm();
        ep.rate = rate_in_force();
        ep.bandit_round = controller.round();
        result.episodes.push_back(ep);
    }

    if (const auto* e = controller.exp3()) result.weight_clamps = e->clamp_events();
    result.env_steps = total_steps;
    result.network = std::move(learner);
    return result;
}

}  // namespace lrrl::rl
