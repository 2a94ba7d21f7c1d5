"""
One runner per scenario. A runner writes its artifacts through the ``ArtifactWriter`` and returns the
summary that goes to summary.json.
"""
import logging

import numpy as np
import pandas as pd

from category_geometry.apps.allocate import api as allocate_api
from category_geometry.apps.allocate.constraints import Entropic, constraint_from_dict
from category_geometry.apps.allocate.problems import AllocationProblem
from category_geometry.apps.categories import api as categories_api
from category_geometry.apps.categories import builders
from category_geometry.apps.categories.constants import MINUS, PLUS
from category_geometry.apps.categories.embedding import LatentEmbedding
from category_geometry.apps.categories.serializers import write_dataset
from category_geometry.apps.catfisher import api as catfisher_api
from category_geometry.apps.core.matrices import FisherMatrix
from category_geometry.apps.infomeasure import api as infomeasure_api
from category_geometry.apps.infomeasure.constants import BITS
from category_geometry.apps.infomeasure.grids import QuadratureGrid, default_grid
from category_geometry.apps.nettrain import api as nettrain_api
from category_geometry.apps.nettrain.decomposition import bias_variance, decompose_cost
from category_geometry.apps.nettrain.serializers import dump_network
from category_geometry.apps.neurocode import api as neurocode_api
from category_geometry.apps.neurocode.serializers import noise_spec_from_dict
from category_geometry.apps.scenarios.artifacts import field_frame
from category_geometry.apps.scenarios.constants import (
    ALLOCATE,
    BIASVAR,
    CONTINUUM,
    DEFAULT_MULTIPLIER,
    FCAT_FIELD,
    FCODE_FIELD,
    GAUSS1D,
    MI_VALIDATE,
    PDC2D,
    TRAIN2D,
)
from category_geometry.apps.scenarios.exceptions import InvalidScenarioConfig
from category_geometry.apps.scenarios.inputs import (
    check_dimension,
    network_from_config,
    resolve_code,
    resolve_model,
    resolve_network,
    train_config,
)


logger = logging.getLogger(__name__)


def information(value, units):
    """
    A value in nats expressed in ``units``.
    """
    return value / np.log(2.0) if units == BITS else value


def _require_positive(config, *keys):
    for key in keys:
        if config[key] < 1:
            raise InvalidScenarioConfig(key, 'must be >= 1, got {}'.format(config[key]))


def _require_nonempty(config, *keys):
    for key in keys:
        if not config[key]:
            raise InvalidScenarioConfig(key, 'must not be empty')


def _coordinates(points, prefix='x'):
    points = np.atleast_2d(points)
    return {'{}_{}'.format(prefix, axis + 1): points[:, axis] for axis in range(points.shape[1])}


def _median(values):
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    return float(np.median(values)) if values.size else float('nan')


def _field_grid(scenario, model):
    bounds = scenario.config['bounds']
    if bounds is None:
        return default_grid(model, scenario.nodes_per_dim)
    try:
        lows, highs = zip(*bounds)
        if len(lows) != model.dim:
            raise ValueError('{} bounds for a {}-D model'.format(len(lows), model.dim))
        return QuadratureGrid.from_box(lows, highs, scenario.nodes_per_dim)
    except (TypeError, ValueError) as error:
        raise InvalidScenarioConfig('bounds', 'expected one [low, high] pair per axis: {}'.format(error))


def _write_network(writer, net, scenario):
    dump_network(net, writer.path('network.json'), metadata={'scenario': scenario.name, 'seed': scenario.seed})
    writer.record('network.json')


def _train(scenario, writer, model, features, labels, input_dim, seeds):
    """
    Train the config's network on ``features``; ``seeds`` fix the initial weights and the SGD run.
    """
    net = network_from_config(scenario, input_dim, model.n_classes, seeds[0])
    result = nettrain_api.train_sgd(net, features, labels, train_config(scenario, seeds[1]))
    writer.write_frame('losses.csv', pd.DataFrame({
        'epoch': np.arange(1, len(result.losses) + 1),
        'loss': result.losses,
    }))
    _write_network(writer, result.net, scenario)
    return net, result


def run_gauss1d(scenario, writer):
    config = scenario.config
    _require_nonempty(config, 'a_values', 'sigma_values')
    if config['n_points'] < 2:
        raise InvalidScenarioConfig('n_points', 'must be >= 2')
    low, high = config['x_range']
    x = np.linspace(low, high, config['n_points'])
    points = x[:, None]

    summaries, profiles = [], []
    for a in config['a_values']:
        for sigma in config['sigma_values']:
            summary = catfisher_api.gauss1d_summary(a, sigma, config['c'])
            summaries.append(summary.to_dict())
            model = builders.gauss_pair_1d(a, sigma, config['c'])
            profiles.append(pd.DataFrame({
                'a': a,
                'sigma': sigma,
                'x': x,
                'density_minus': np.exp(model.components[MINUS].logpdf(points)),
                'density_plus': np.exp(model.components[PLUS].logpdf(points)),
                'posterior_plus': catfisher_api.posterior_plus(model, points),
                'f_cat': catfisher_api.f_cat(model, points),
            }))
    writer.write_frame('gauss1d_summary.csv', pd.DataFrame(summaries))
    writer.write_frame('gauss1d_profiles.csv', pd.concat(profiles, ignore_index=True))
    return {
        'cases': [
            {'a': row['a'], 'sigma': row['sigma'], 'x_b': row['x_b_plus'], 'x_cat': row['x_cat_plus']}
            for row in summaries
        ],
    }


def circular_geometry(model):
    """
    Centre, boundary radius and maxima radius of a pair with Sigma_- = sigma^2 I, Sigma_+ = a^2 sigma^2 I,
    a > 1, means -c and +c and equal priors; None for any other model.
    """
    if not model.is_gaussian or model.n_classes != 2 or not np.allclose(model.priors, 0.5):
        return None
    minus, plus = model.components
    identity = np.eye(model.dim)
    var_minus, var_plus = minus.cov[0, 0], plus.cov[0, 0]
    isotropic = np.allclose(minus.cov, var_minus * identity) and np.allclose(plus.cov, var_plus * identity)
    if not isotropic or not np.allclose(minus.mean, -plus.mean) or var_plus <= var_minus:
        return None
    a, sigma = np.sqrt(var_plus / var_minus), np.sqrt(var_minus)
    eta, rho, _, z_b = catfisher_api.diagonal_case_parameters(a, sigma, np.linalg.norm(plus.mean), model.dim)
    return -rho * plus.mean, z_b, catfisher_api.maxima_radius(eta, z_b)


def run_pdc2d(scenario, writer):
    config = scenario.config
    model = resolve_model(scenario)
    check_dimension('model', 2, model.dim)
    _require_positive(config, 'n_curves')
    geometry = circular_geometry(model)
    origin = model.components[MINUS].mean
    angles = 2.0 * np.pi * np.arange(config['n_curves']) / config['n_curves']

    curves, crossings = [], []
    for curve_id, angle in enumerate(angles):
        start = origin + config['start_radius'] * np.array([np.cos(angle), np.sin(angle)])
        pdc = catfisher_api.trace_pdc(model, start, config['step'], config['max_arc'], config['margin'])
        boundary = catfisher_api.find_boundary_on_pdc(model, pdc)
        maximum = catfisher_api.find_fcat_max_on_pdc(model, pdc)
        curves.append(pd.DataFrame({'curve_id': curve_id, 's': pdc.arc_lengths, **_coordinates(pdc.points)}))
        row = {
            'curve_id': curve_id,
            **_coordinates(start, 'start'),
            **_coordinates(boundary, 'boundary'),
            **_coordinates(maximum, 'max'),
            'f_cat_max': float(catfisher_api.f_cat(model, maximum)),
            'displacement_estimate': catfisher_api.max_displacement_estimate(model, boundary),
        }
        if geometry is not None:
            center = geometry[0]
            ray = (start - center) / np.linalg.norm(start - center)
            offsets = pdc.points - center
            lateral = offsets - np.outer(offsets @ ray, ray)
            row['boundary_radius'] = float(np.linalg.norm(boundary - center))
            row['max_radius'] = float(np.linalg.norm(maximum - center))
            row['lateral_deviation'] = float(np.max(np.linalg.norm(lateral, axis=1)))
        crossings.append(row)

    writer.write_frame('pdc_polylines.csv', pd.concat(curves, ignore_index=True))
    crossings = pd.DataFrame(crossings)
    writer.write_frame('pdc_crossings.csv', crossings)
    summary = {'curves': len(angles), 'circular': geometry is not None}
    if geometry is not None:
        center, z_b, z = geometry
        summary.update({
            'center': center,
            'boundary_radius': z_b,
            'maxima_radius': z,
            'max_boundary_radius_error': float(np.max(np.abs(crossings['boundary_radius'] - z_b))),
            'max_maxima_radius_error': float(np.max(np.abs(crossings['max_radius'] - z))),
            'max_lateral_deviation': float(crossings['lateral_deviation'].max()),
        })
    return summary


def run_fcat_field(scenario, writer):
    model = resolve_model(scenario)
    grid = _field_grid(scenario, model)
    entries = catfisher_api.fisher_cat_field(model, grid.nodes, scenario.threads)
    fishers = [FisherMatrix.from_entries(entry) for entry in entries]
    frame = field_frame(grid.nodes, fishers, 'fcat')
    posterior = np.exp(model.log_posterior(grid.nodes))
    for label in range(model.n_classes):
        frame['p_{}'.format(label)] = posterior[:, label]
    frame['density'] = model.density(grid.nodes)
    writer.write_frame('fcat_field.csv', frame)
    return {
        'nodes': grid.size,
        'max_trace': float(frame['fcat_trace'].max()),
        'expected_trace': grid.expectation(model, frame['fcat_trace'].to_numpy()),
    }


def run_fcode_field(scenario, writer):
    model = resolve_model(scenario)
    grid = _field_grid(scenario, model)
    net = resolve_network(scenario)
    if net is not None:
        check_dimension('network_file', model.dim, net.input_dim)
        fishers = nettrain_api.fisher_code_net_field(net, grid.nodes, scenario.threads)
        source = 'network'
    else:
        code = resolve_code(scenario)
        check_dimension('code', model.dim, code.dim)
        fishers = neurocode_api.fisher_code_field(code, grid.nodes, scenario.threads)
        source = 'code'

    cat_fishers = [
        FisherMatrix.from_entries(entry)
        for entry in catfisher_api.fisher_cat_field(model, grid.nodes, scenario.threads)
    ]
    alignments = [nettrain_api.eigen_alignment(fcat, fcode) for fcat, fcode in zip(cat_fishers, fishers)]
    frame = field_frame(grid.nodes, fishers, 'fcode')
    frame['fcat_trace'] = [fisher.trace for fisher in cat_fishers]
    frame['angle'] = [alignment.angle for alignment in alignments]
    frame['ratio'] = [alignment.ratio for alignment in alignments]
    writer.write_frame('fcode_field.csv', frame)

    entries = np.array([fisher.entries for fisher in fishers])
    gap = infomeasure_api.asymptotic_gap(model, entries, grid, scenario.threads)
    return {
        'source': source,
        'nodes': grid.size,
        'asymptotic_gap': information(gap.estimate, scenario.units),
        'excluded_mass': gap.excluded_mass,
        'flags': list(gap.flags),
        'units': scenario.units,
    }


def _alignments(model, net, points, threads):
    fcode = nettrain_api.fisher_code_net_field(net, points, threads)
    fcat = [catfisher_api.fisher_cat(model, point) for point in points]
    return [nettrain_api.eigen_alignment(cat, code) for cat, code in zip(fcat, fcode)], fcode


def run_train2d(scenario, writer):
    config = scenario.config
    _require_positive(config, 'n_train', 'n_test', 'n_probes')
    model = resolve_model(scenario)
    seeds = scenario.derived_seeds(6)
    train = categories_api.sample(model, config['n_train'], seeds[0])
    test = categories_api.sample(model, config['n_test'], seeds[1])
    write_dataset(writer.path('train.csv'), train.features, train.labels, writer.float_format)
    writer.record('train.csv')
    untrained, result = _train(scenario, writer, model, train.features, train.labels, model.dim, seeds[2:4])

    probes = nettrain_api.boundary_probes(model, config['n_probes'], seed=seeds[4])
    interior = nettrain_api.interior_probes(model, config['n_probes'], seed=seeds[5])
    before, _ = _alignments(model, untrained, probes.points, scenario.threads)
    after, fcode = _alignments(model, result.net, probes.points, scenario.threads)
    frame = pd.DataFrame({
        **_coordinates(probes.points),
        'class_i': probes.pairs[:, 0],
        'class_j': probes.pairs[:, 1],
        'triple_distance': probes.triple_distance,
        'angle_before': [alignment.angle for alignment in before],
        'angle_after': [alignment.angle for alignment in after],
        'ratio_before': [alignment.ratio for alignment in before],
        'ratio_after': [alignment.ratio for alignment in after],
        'fcode_trace': [fisher.trace for fisher in fcode],
    })
    writer.write_frame('probes.csv', frame)

    distance = probes.triple_distance
    far = np.isnan(distance) | (distance > config['triple_exclusion'])
    contrast = nettrain_api.eigenvalue_contrast(result.net, probes.points, interior, threads=scenario.threads)
    return {
        'accuracy': nettrain_api.accuracy(result.net, test.features, test.labels),
        'bayes_rate': infomeasure_api.bayes_rate(model, default_grid(model, scenario.nodes_per_dim)),
        'initial_loss': result.initial_loss,
        'final_loss': result.final_loss,
        'median_angle_before': _median(frame['angle_before']),
        'median_angle_after': _median(frame['angle_after']),
        'median_ratio_far': _median(frame['ratio_after'][far]),
        'median_ratio_near': _median(frame['ratio_after'][~far]),
        'eigenvalue_contrast': contrast,
        'far_probes': int(far.sum()),
    }


def run_continuum(scenario, writer):
    config = scenario.config
    _require_positive(config, 'n_train', 'ambient_dim')
    model = resolve_model(scenario)
    check_dimension('path_start', model.dim, len(config['path_start']))
    check_dimension('path_end', model.dim, len(config['path_end']))
    seeds = scenario.derived_seeds(4)
    embedding = LatentEmbedding(
        model.dim, config['ambient_dim'], seed=seeds[0], squash=config['squash'], scale=config['embedding_scale'],
    )
    train = categories_api.sample(model, config['n_train'], seeds[1])
    _, result = _train(scenario, writer, model, embedding.embed(train.features), train.labels,
                       config['ambient_dim'], seeds[2:4])
    net = result.net

    probe = nettrain_api.PathProbe.linear(config['path_start'], config['path_end'], config['n_points'])
    fisher = nettrain_api.fisher_along_path(net, probe, input_map=embedding, threads=scenario.threads)
    profile = nettrain_api.cosine_proxy(net, probe, input_map=embedding, fisher=fisher)
    curves = nettrain_api.tuning_curves(net, probe, input_map=embedding, threads=scenario.threads)
    posteriors = categories_api.posterior(model, probe.points)
    fraction = nettrain_api.transition_fraction(curves, posteriors, config['transition_threshold'])
    boundary_index = int(np.argmin(np.max(posteriors, axis=1)))

    path = pd.DataFrame({
        't': fisher.t,
        **_coordinates(probe.points, 's'),
        'arc_length': fisher.arc_length,
        'fisher_per_arc': fisher.per_arc,
        'fisher_per_index': fisher.per_index,
    })
    for label in range(model.n_classes):
        path['p_{}'.format(label)] = posteriors[:, label]
    writer.write_frame('path_fisher.csv', path)
    writer.write_frame('cosine_proxy.csv', pd.DataFrame({
        't_mid': fisher.t[:-1] + 0.5,
        'distance': profile.distances,
        'fisher': profile.fisher,
    }))
    tuning = pd.DataFrame({'t': curves.t})
    for column, unit in enumerate(curves.unit_ids):
        tuning['unit_{}'.format(unit)] = curves.responses[:, column]
    writer.write_frame('tuning_curves.csv', tuning)

    return {
        'fisher_argmax': fisher.argmax,
        'boundary_index': boundary_index,
        'argmax_offset': abs(fisher.argmax - boundary_index),
        'fit': profile.fit._asdict(),
        'transition_fraction': fraction,
        'active_units': int(np.count_nonzero(curves.steepest() >= 0)),
        'final_loss': result.final_loss,
        'flags': list(fisher.flags),
    }


def run_mi_validate(scenario, writer):
    config = scenario.config
    _require_nonempty(config, 'ns')
    model = resolve_model(scenario)
    check_dimension('model', 1, model.dim)
    population = config['population']
    noise = noise_spec_from_dict(population['noise'])
    grid = default_grid(model, scenario.nodes_per_dim)
    mc = scenario.mc()
    units = scenario.units

    rows = []
    for n_units in config['ns']:
        code = neurocode_api.dense_sigmoid_population(
            n_units, tuple(population['span']), population['width'], population['max_rate'], noise,
        )
        cost = infomeasure_api.coding_cost(model, code, mc, grid, config['antithetic'])
        gap = infomeasure_api.asymptotic_gap(model, code, grid, scenario.threads)
        logger.info('N = {}: measured gap {:.6g}, asymptotic {:.6g}'.format(n_units, cost.estimate, gap.estimate))
        rows.append({
            'n_units': n_units,
            'gap_mc': information(cost.estimate, units),
            'std_err': information(cost.std_err, units),
            'gap_asymptotic': information(gap.estimate, units),
            'relative_difference': (cost.estimate - gap.estimate) / gap.estimate,
            'i_yx': information(cost.i_yx, units),
            'i_yr': information(cost.i_yr, units),
        })
    frame = pd.DataFrame(rows)
    writer.write_frame('mi_validate.csv', frame)

    summary = {'units': units, 'fit': None}
    try:
        summary['fit'] = infomeasure_api.fit_power_law(frame['n_units'], frame['gap_mc'])._asdict()
    except ValueError as error:
        logger.warning('No power-law fit of the measured gaps: {}'.format(error))
    return summary


def run_allocate(scenario, writer):
    config = scenario.config
    model = resolve_model(scenario)
    constraint = constraint_from_dict(config['constraint'])
    multiplier = config['multiplier']
    if multiplier is None and config['budget'] is None and not isinstance(constraint, Entropic):
        multiplier = DEFAULT_MULTIPLIER
    problem = AllocationProblem.from_model(
        model, constraint, multiplier, config['budget'], scenario.nodes_per_dim, config['ratio'],
    )
    allocation = allocate_api.solve(problem, scenario.threads)
    solved = problem.with_multiplier(allocation.multiplier)
    frame = allocation.to_frame(problem)
    summary = {
        'allocation': allocation.to_dict(),
        'objective': allocate_api.objective(solved, allocation.fcode),
        'coding_gap': information(allocate_api.coding_gap(solved, allocation.fcode), scenario.units),
        'resource': solved.resource(allocation.fcode),
        'branches': allocate_api.branch_summary(allocation),
        'units': scenario.units,
    }
    if config['compare_grid']:
        oracle = allocate_api.grid_minimize(solved, scenario.threads)
        frame['fcode_grid'] = oracle.fcode
        active = problem.active
        difference = np.abs(allocation.fcode[active] - oracle.fcode[active]) / oracle.fcode[active]
        summary['max_relative_difference'] = float(difference.max()) if difference.size else 0.0
    writer.write_frame('allocation.csv', frame)
    return summary


def run_biasvar(scenario, writer):
    config = scenario.config
    model = resolve_model(scenario)
    axes = config['projection_axes']
    input_dim = len(axes) if axes else model.dim
    net = resolve_network(scenario)
    if net is None:
        _require_positive(config, 'n_train')
        seeds = scenario.derived_seeds(3)
        train = categories_api.sample(model, config['n_train'], seeds[0])
        features = train.features[:, axes] if axes else train.features
        _, result = _train(scenario, writer, model, features, train.labels, input_dim, seeds[1:])
        net = result.net
    else:
        check_dimension('network_file', input_dim, net.input_dim)

    mc = scenario.mc()
    cost = decompose_cost(model, net, mc, default_grid(model, scenario.nodes_per_dim), projection_axes=axes)
    split = bias_variance(model, net, mc, projection_axes=axes)
    units = scenario.units
    rows = []
    for name, result in (('coding_decoding', cost), ('bias_variance', split)):
        for term in ('total', 'coding', 'decoding', 'decoding_direct', 'manifold', 'bias', 'variance'):
            if term in result._fields:
                value = getattr(result, term)
                rows.append({
                    'split': name,
                    'term': term,
                    'estimate': information(value.estimate, units),
                    'std_err': information(value.std_err, units),
                })
    writer.write_frame('decomposition.csv', pd.DataFrame(rows))
    band = split.band
    return {
        'units': units,
        'band': {
            'epsilon': band.epsilon,
            'lower': information(band.lower, units),
            'upper': information(band.upper, units),
            'variance': information(split.variance.estimate, units),
        },
    }


RUNNERS = {
    GAUSS1D: run_gauss1d,
    PDC2D: run_pdc2d,
    FCAT_FIELD: run_fcat_field,
    FCODE_FIELD: run_fcode_field,
    TRAIN2D: run_train2d,
    CONTINUUM: run_continuum,
    MI_VALIDATE: run_mi_validate,
    ALLOCATE: run_allocate,
    BIASVAR: run_biasvar,
}
