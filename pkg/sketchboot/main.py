import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from sketchboot import settings
from sketchboot.bootstrap import (
	FAMILIES,
	BootstrapConfig,
	bootstrap_errors,
	extrapolate_curve,
	required_sketch_size,
)
from sketchboot.exceptions import ConfigError, MatrixFormatError, NumericalError, SketchbootError
from sketchboot.matrixio import MatrixFormat, read_matrix, write_matrix
from sketchboot.pipelines import (
	RunManifest,
	export_curves,
	export_estimate,
	export_manifest,
	export_trials,
	utc_now,
)
from sketchboot.sketchers import Sketch, SketchKind, SketchSpec, sketch_matrix
from sketchboot.solve import sketched_svd_from_sketch
from sketchboot.streams import RowStream
from sketchboot.utils import (
	parse_grid,
	parse_index_set,
	parse_probabilities_flag,
	positive_float,
	positive_int,
	resolve_probabilities,
	seed_int,
	unit_interval,
)
from sketchboot.version import __version__
from sketchboot.workflows import ExperimentConfig, run_adaptive_workflow, run_experiment

version = __version__
welcome_msg = f'''
 _____________
|  A  (n x d) |      ___________
|             | S   |~A  (t x d)|
|             | --> |___________|  --> sigma, u, v  +/- q(t)
|_____________|
sketchboot v{version}
'''

started_msg = '\nsketchboot: started'
finished_msg = 'sketchboot: finished'

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def emit_error(kind, code, message):
	"""One machine-readable line on stderr per failure."""
	line = json.dumps({'error': kind, 'code': code, 'message': str(message)})
	print(line, file=sys.stderr)
	return code


class SketchbootArgumentParser(argparse.ArgumentParser):
	def error(self, message):
		emit_error('ArgumentError', EXIT_USAGE, f'{self.prog}: {message}')
		sys.exit(EXIT_USAGE)


def exit_code_for(exc):
	# MatrixFormatError is also a SketchbootError, so it is checked first
	if isinstance(exc, (MatrixFormatError, OSError)):
		return EXIT_IO
	if isinstance(exc, NumericalError):
		return EXIT_NUMERICAL
	return EXIT_USAGE


def cli_sketch(args):
	matrix = read_matrix(args['input'])
	stream = RowStream(matrix)
	kind = SketchKind(args['kind'])

	probabilities = None
	if kind is SketchKind.ROW_SAMPLING:
		probabilities = resolve_probabilities(args['probs'], stream, stream.rows)

	spec = SketchSpec(kind, args['t'], args['seed'], probabilities)
	sketch = sketch_matrix(stream, spec, n_jobs=args['jobs'])

	out = write_matrix(args['out'], sketch.a_tilde, args['format'])
	print(f'sketchboot: t={sketch.t} d={sketch.d} passes={stream.passes}')
	print(f'sketchboot: {out} file was created')
	return EXIT_OK


def cli_estimate(args):
	sketch = Sketch(read_matrix(args['sketch']))
	sketched = sketched_svd_from_sketch(sketch, args['k'])
	config = BootstrapConfig(
		B=args['B'],
		alpha=args['alpha'],
		index_set=args['J'],
		seed=args['seed'],
	)
	estimate = bootstrap_errors(sketch, sketched, config, n_jobs=args['jobs'])

	extrapolated = None
	if args['extrapolate']:
		extrapolated = extrapolate_curve(estimate, args['extrapolate'])

	required_t = None
	if args['tolerance']:
		required_t = {
			family: required_sketch_size(estimate, args['tolerance'], family)
			for family in FAMILIES
		}

	out = export_estimate(args['out'], estimate, extrapolated, required_t)
	print(
		f'sketchboot: t0={estimate.t0} q_u={estimate.q_u:.6g} '
		f'q_sigma={estimate.q_sigma:.6g} q_v={estimate.q_v:.6g}'
	)
	if estimate.rank_deficient:
		print('sketchboot: warning: some resampled sketches were rank-deficient')
	print(f'sketchboot: {out} file was created')
	return EXIT_OK


def cli_experiment(args):
	config_path = Path(args['config'])
	try:
		with config_path.open('r', encoding='utf-8') as f:
			payload = json.load(f)
	except json.JSONDecodeError as exc:
		raise ConfigError(f'{config_path}: invalid JSON ({exc})') from exc

	cfg = ExperimentConfig.from_dict(payload, base_dir=config_path.parent)
	if args['jobs']:
		cfg = dataclasses.replace(cfg, n_jobs=args['jobs'])

	out_dir = Path(args['out'])
	out_dir.mkdir(parents=True, exist_ok=True)
	manifest = RunManifest(cfg.to_dict(), cfg.master_seed, utc_now())

	curves = run_experiment(cfg)

	outputs = [
		export_curves(out_dir / 'curves.csv', curves),
		export_trials(out_dir / 'trials.csv', curves),
	]
	for path in outputs:
		manifest.add_output(path)
		print(f'sketchboot: {path} file was created')

	manifest_path = export_manifest(out_dir / 'manifest.json', manifest)
	print(f'sketchboot: {manifest_path} file was created')
	return EXIT_OK


def cli_adaptive(args):
	matrix = read_matrix(args['input'])
	stream = RowStream(matrix)
	kind = SketchKind(args['kind'])

	probabilities = None
	if kind is SketchKind.ROW_SAMPLING:
		probabilities = resolve_probabilities(args['probs'], stream, stream.rows)

	spec = SketchSpec(kind, args['t0'], args['seed'], probabilities)
	config = BootstrapConfig(
		B=args['B'],
		alpha=args['alpha'],
		index_set=args['J'],
		seed=args['seed'],
	)
	result = run_adaptive_workflow(
		stream,
		spec,
		args['k'],
		args['tolerance'],
		family=args['family'],
		config=config,
		max_t=args['max_t'],
		n_jobs=args['jobs'],
	)

	out = Path(args['out'])
	out.parent.mkdir(parents=True, exist_ok=True)
	with out.open('w', encoding='utf-8') as f:
		json.dump(result.to_dict(), f, indent=2)
		f.write('\n')

	print(f'sketchboot: t0={result.t0} t1={result.t1} achieved={result.achieved} passes={result.passes}')
	print(f'sketchboot: {out} file was created')
	return EXIT_OK


def add_bootstrap_arguments(parser):
	parser.add_argument(
		'--k',
		dest='k',
		type=positive_int,
		required=True,
		help='Number of singular triplets to compute'
	)

	parser.add_argument(
		'--J',
		dest='J',
		type=parse_index_set,
		default=settings.INDEX_SET,
		help='Index set, comma-separated and 1-based (e.g. 1,2,3)'
	)

	parser.add_argument(
		'--alpha',
		dest='alpha',
		type=unit_interval,
		default=settings.ALPHA,
		help='Quantiles are estimated at level 1 - alpha'
	)

	parser.add_argument(
		'--B',
		dest='B',
		type=positive_int,
		default=settings.BOOTSTRAP_SAMPLES,
		help='Number of bootstrap replicates'
	)


def add_sketch_arguments(parser):
	parser.add_argument(
		'--input', '-i',
		dest='input',
		required=True,
		help='Matrix file (.mtx for MatrixMarket, anything else is RawF64)'
	)

	parser.add_argument(
		'--kind',
		dest='kind',
		choices=[kind.value for kind in SketchKind],
		default=SketchKind.ROW_SAMPLING.value,
		help='Sketching operator'
	)

	parser.add_argument(
		'--probs',
		dest='probs',
		type=parse_probabilities_flag,
		default=('sqlen', None),
		help='Row-sampling probabilities: uniform, sqlen or file:<path>'
	)


def build_parser():
	parser = SketchbootArgumentParser(
		prog='sketchboot',
		description='Sketch-and-solve SVD with bootstrap estimates of the sketching error',
	)

	parser.add_argument(
		'--version',
		action='version',
		version=f'sketchboot {version}'
	)

	parser.add_argument(
		'--log', '-l',
		dest='log',
		action='store_true',
		required=False,
		help='View the logging while running'
	)

	subparsers = parser.add_subparsers(dest='command', required=True)

	sketch = subparsers.add_parser('sketch', help='Build the sketch of a matrix file')
	add_sketch_arguments(sketch)
	sketch.add_argument('--t', dest='t', type=positive_int, required=True, help='Sketch size')
	sketch.add_argument('--seed', dest='seed', type=seed_int, default=0, help='Unsigned 64-bit seed')
	sketch.add_argument('--out', '-o', dest='out', required=True, help='Output matrix file')
	sketch.add_argument(
		'--format',
		dest='format',
		choices=[fmt.value for fmt in MatrixFormat],
		default=MatrixFormat.RAW_F64.value,
		help='Output matrix format'
	)
	sketch.add_argument('--jobs', dest='jobs', type=positive_int, default=None, help='Parallel workers')
	sketch.set_defaults(handler=cli_sketch)

	estimate = subparsers.add_parser('estimate', help='Bootstrap the error quantiles of a sketch')
	estimate.add_argument('--sketch', '-s', dest='sketch', required=True, help='Sketch matrix file')
	add_bootstrap_arguments(estimate)
	estimate.add_argument('--seed', dest='seed', type=seed_int, default=0, help='Unsigned 64-bit seed')
	estimate.add_argument(
		'--extrapolate',
		dest='extrapolate',
		type=parse_grid,
		default=None,
		help='Sketch sizes to extrapolate to: start:stop:step (stop included when aligned) or a comma list'
	)
	estimate.add_argument(
		'--tolerance',
		dest='tolerance',
		type=positive_float,
		default=None,
		help='Report the sketch size each family needs to reach this error'
	)
	estimate.add_argument('--out', '-o', dest='out', required=True, help='Output JSON file')
	estimate.add_argument('--jobs', dest='jobs', type=positive_int, default=None, help='Parallel workers')
	estimate.set_defaults(handler=cli_estimate)

	experiment = subparsers.add_parser('experiment', help='Run a Monte-Carlo validation experiment')
	experiment.add_argument('--config', '-c', dest='config', required=True, help='Experiment JSON config')
	experiment.add_argument(
		'--out', '-o',
		dest='out',
		default=settings.DATA_DIRECTORY,
		help='Output directory for curves.csv, trials.csv and manifest.json'
	)
	experiment.add_argument('--jobs', dest='jobs', type=positive_int, default=None, help='Parallel workers')
	experiment.set_defaults(handler=cli_experiment)

	adaptive = subparsers.add_parser('adaptive', help='Choose the sketch size that meets a tolerance')
	add_sketch_arguments(adaptive)
	adaptive.add_argument('--t0', dest='t0', type=positive_int, required=True, help='Initial sketch size')
	add_bootstrap_arguments(adaptive)
	adaptive.add_argument('--seed', dest='seed', type=seed_int, default=0, help='Unsigned 64-bit seed')
	adaptive.add_argument('--tolerance', dest='tolerance', type=positive_float, required=True, help='Target error')
	adaptive.add_argument('--family', dest='family', choices=FAMILIES, default='u', help='Error family to control')
	adaptive.add_argument('--max-t', dest='max_t', type=positive_int, default=None, help='Upper bound on the forecast')
	adaptive.add_argument('--out', '-o', dest='out', required=True, help='Output JSON file')
	adaptive.add_argument('--jobs', dest='jobs', type=positive_int, default=None, help='Parallel workers')
	adaptive.set_defaults(handler=cli_adaptive)

	return parser


def main(argv=None):
	print(welcome_msg)

	parser = build_parser()
	try:
		args = vars(parser.parse_args(argv))
	except SystemExit as exc:
		return exc.code

	print(started_msg)

	logging.disable(logging.CRITICAL)

	if args['log']:
		logging.basicConfig(level=logging.INFO, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
		logging.disable(logging.NOTSET)

	try:
		code = args['handler'](args)
	except (SketchbootError, OSError, ValueError) as exc:
		return emit_error(type(exc).__name__, exit_code_for(exc), exc)

	print(finished_msg)
	return code


if __name__ == '__main__':
	sys.exit(main())
