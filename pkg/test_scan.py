"""Tests for detection, grid scans, thresholds and scan output files."""
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from config import config
from controllers import scan_controller
from controllers.scan_controller import ScanController, ghz_reference_thresholds, parse_part
from controllers.state_controller import build_family
from models.report import Criterion, OptimizerConfig
from models.scan import AxisSpec, ScanSpec, parse_grid
from models.state_family import StateFamily
from utils.error_handler import CapacityError, UsageError
from utils.report_generator import ReportGenerator, read_scan_csv, read_scan_json, scan_to_csv, scan_to_json

SMALL = OptimizerConfig(restarts=4, iterations=60, basis_seeds=2)


@pytest.fixture
def controller():
    return ScanController(SMALL, workers=1)


def ghz_w_spec(grid='0:1:0.1,0:1:0.1', workers=None):
    alpha_axis, beta_axis = parse_grid(grid)
    return ScanSpec(StateFamily('ghz_w_mix'), alpha_axis, beta_axis,
                    criteria=(Criterion.II, Criterion.III), workers=workers)


# detect

def test_detect_examples(controller):
    [ghz_report] = controller.detect(StateFamily('ghz', d=2, n=3, p=0.5), ['II'])
    assert ghz_report.violated
    [w_report] = controller.detect(StateFamily('w', n=3, p=0.5), ['III'])
    assert not w_report.violated


def test_detect_reports_every_bipartition(controller):
    reports = controller.detect(StateFamily('ghz', p=0.5), ['I', 'PPT', 'II'])
    assert [r.criterion for r in reports].count(Criterion.I) == 3
    assert [r.criterion for r in reports].count(Criterion.PPT) == 3
    assert [r.criterion for r in reports].count(Criterion.II) == 1


def test_detect_smolin_cuts(controller):
    family = StateFamily('smolin', d=2, alpha=0.3, beta=0.3)
    reports = {r.partition: r for r in controller.detect(family, ['I'])}
    assert len(reports) == 7
    for side in [(1,), (1, 3, 4), (1, 2, 4), (1, 2, 3)]:
        assert reports[parse_part(side, 4).label].violated
    assert not reports['A={1,2}|B={3,4}'].violated


@pytest.mark.parametrize('alpha,beta', [(0.3, 0.3), (0.5, 0.3), (0.6, 0.2), (0.2, 0.6)])
def test_smolin_pair_cuts_follow_weight_imbalance(controller, alpha, beta):
    family = StateFamily('smolin', d=2, alpha=alpha, beta=beta)
    reports = {r.partition: r for r in controller.detect(family, ['I'])}
    expected = abs(alpha - beta) / 4 - (1 - alpha - beta) / 16
    for side in [(1, 3), (1, 4)]:
        report = reports[parse_part(side, 4).label]
        assert report.lhs == pytest.approx(expected, abs=1e-12)
        assert report.violated == (alpha != beta)
    assert reports['A={1,2}|B={3,4}'].lhs == pytest.approx(-(1 - alpha - beta) / 16, abs=1e-12)


def test_detect_with_single_cut(controller):
    [report] = controller.detect(StateFamily('ghz', p=0.5), ['I'], part=parse_part('2', 3))
    assert report.partition == 'A={1,3}|B={2}'


# scan

def test_ghz_w_mix_spot_checks(controller):
    result = controller.scan(ghz_w_spec())
    assert result.cell(0.6, 0.0).violated['II']
    assert result.cell(0.0, 0.6).violated['III']
    assert not any(result.cell(0.0, 0.0).violated.values())
    assert len(result.cell(0.3, 0.3).ppt_min_eigenvalues) == 3


def test_qutrit_mix_spot_checks(controller):
    alpha_axis, beta_axis = parse_grid('0:1:0.25,0:1:0.25')
    result = controller.scan(ScanSpec(StateFamily('gghz_qutrit_mix'), alpha_axis, beta_axis,
                                      criteria=(Criterion.II, Criterion.III)))
    pure = result.cell(0.0, 1.0)
    assert pure.violated['II']
    assert pure.lhs['II'] == pytest.approx(1 / 3)
    assert not any(result.cell(0.0, 0.0).violated.values())


def test_scan_cells_and_order(controller):
    result = controller.scan(ghz_w_spec('0:1:0.5,0:1:0.5'))
    assert [(c.alpha, c.beta) for c in result.cells] == [
        (0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 0.0), (0.5, 0.5), (1.0, 0.0)]
    assert len(result.rows()) == 12


def test_scan_is_reproducible_and_thread_independent(controller):
    serial = controller.scan(ghz_w_spec('0:1:0.2,0:1:0.2'))
    again = controller.scan(ghz_w_spec('0:1:0.2,0:1:0.2'))
    threaded = controller.scan(ghz_w_spec('0:1:0.2,0:1:0.2', workers=4))
    assert serial.rows() == again.rows() == threaded.rows()


@pytest.mark.parametrize('spec_workers,expected', [(None, [3]), (2, [2]), (1, [])])
def test_scan_workers_fall_back_to_controller(monkeypatch, spec_workers, expected):
    seen = []

    class RecordingPool(ThreadPoolExecutor):
        def __init__(self, max_workers=None, **kwargs):
            seen.append(max_workers)
            super().__init__(max_workers=max_workers, **kwargs)

    monkeypatch.setattr(scan_controller, 'ThreadPoolExecutor', RecordingPool)
    ScanController(SMALL, workers=3).scan(ghz_w_spec('0:1:0.5,0:1:0.5', workers=spec_workers))
    assert seen == expected


def test_per_cut_regions_differ_on_qutrit_mix(controller):
    alpha_axis, beta_axis = parse_grid('0:1:0.25,0:1:0.25')
    result = controller.scan(ScanSpec(StateFamily('gghz_qutrit_mix'), alpha_axis, beta_axis,
                                      criteria=(Criterion.I,)))
    bisep = result.cell(1.0, 0.0)
    assert set(bisep.cut_lhs['I']) == {'A={1}|B={2,3}', 'A={1,2}|B={3}', 'A={1,3}|B={2}'}
    assert bisep.cut_lhs['I']['A={1,2}|B={3}'] == pytest.approx(1 / 3)
    assert bisep.lhs['I'] == min(bisep.cut_lhs['I'].values())
    assert not bisep.violated['I']
    product_cut = result.violated_cells('I', 'A={1}|B={2,3}')
    entangled_cut = result.violated_cells('I', 'A={1,2}|B={3}')
    assert (1.0, 0.0) in entangled_cut
    assert (1.0, 0.0) not in product_cut
    assert set(product_cut) < set(entangled_cut)
    assert bisep.to_dict()['cut_lhs']['I'] == bisep.cut_lhs['I']


def test_csv_and_json_encodings_agree(controller, tmp_path):
    result = controller.scan(ghz_w_spec('0:1:0.25,0:1:0.25'))
    assert read_scan_csv(scan_to_csv(result)) == read_scan_json(scan_to_json(result)) == result.rows()
    generator = ReportGenerator(tmp_path)
    path = generator.write_scan(result, fmt='csv')
    assert path.name == 'scan_ghz_w_mix.csv'
    assert path.read_text(encoding='utf-8').splitlines()[0] == 'alpha,beta,crit,lhs,violated'


def test_xlsx_export(controller, tmp_path):
    openpyxl = pytest.importorskip('openpyxl')
    result = controller.scan(ghz_w_spec('0:1:0.5,0:1:0.5'))
    path = ReportGenerator(tmp_path).write_scan(result, tmp_path / 'scan.xlsx', fmt='xlsx')
    sheet = openpyxl.load_workbook(path)['Scan']
    assert [cell.value for cell in sheet[1]] == ['alpha', 'beta', 'crit', 'lhs', 'violated']
    assert sheet.max_row == len(result.rows()) + 1


def test_scan_spec_validation(monkeypatch):
    with pytest.raises(UsageError):
        AxisSpec('alpha', 0.0, 1.0, 0.0)
    with pytest.raises(UsageError):
        parse_grid('0:1:0.1')
    with pytest.raises(UsageError):
        parse_grid('0:1,0:1:0.1')
    with pytest.raises(UsageError):
        ScanSpec(StateFamily('ghz_w_mix'), *parse_grid('0:1:0.5,0:1:0.5'), policy='random')
    monkeypatch.setattr(config, 'MAX_GRID_CELLS', 10)
    with pytest.raises(CapacityError):
        ghz_w_spec('0:1:0.1,0:1:0.1')


def test_axis_values_are_inclusive():
    assert AxisSpec('alpha', 0.0, 1.0, 0.1).values()[-1] == 1.0
    assert len(AxisSpec('alpha', 0.0, 1.0, 0.01)) == 101


# Smolin region

def _check_smolin_region(controller, policy, step):
    axis = AxisSpec('alpha', 0.0, 1.0, step)
    single_cuts = [parse_part(side, 4) for side in [(1,), (1, 3, 4), (1, 2, 4), (1, 2, 3)]]
    for alpha in axis.values():
        for beta in axis.values():
            if alpha + beta > 1 or not (1 - 5 * alpha - beta < -0.05 and 1 - alpha - 5 * beta < -0.05):
                continue
            family = StateFamily('smolin', d=2, alpha=alpha, beta=beta)
            rho = build_family(family)
            for cut in single_cuts:
                [report] = controller.criterion_reports(rho, family, 'I', policy, cut)
                assert report.violated, (alpha, beta, cut.label)
    noise = StateFamily('smolin', d=2)
    assert not any(r.violated for r in controller.detect(noise, ['I', 'II', 'PPT'], policy))


def test_smolin_region_with_fixed_probes(controller):
    _check_smolin_region(controller, 'fixed', 0.1)


@pytest.mark.slow
def test_smolin_region_with_optimizer():
    controller = ScanController(OptimizerConfig(restarts=32, iterations=100), workers=1)
    _check_smolin_region(controller, 'optimize', 0.1)


# thresholds

def test_w_noise_threshold(controller):
    start = time.perf_counter()
    value = controller.threshold(StateFamily('w', n=3), 'p', 0.0, 1.0, 'III', tol=1e-6)
    assert value == pytest.approx(8 / 17, abs=1e-6)
    assert time.perf_counter() - start < 1.0


@pytest.mark.parametrize('d,n,expected', [(2, 3, 3 / 7), (3, 3, 1 / 4), (2, 4, 7 / 15)])
def test_ghz_noise_thresholds(controller, d, n, expected):
    start = time.perf_counter()
    value = controller.threshold(StateFamily('ghz', d=d, n=n), 'p', 0.0, 1.0, 'II', tol=1e-6)
    assert time.perf_counter() - start < 1.0
    assert value == pytest.approx(expected, abs=1e-6)
    assert ghz_reference_thresholds(d, n)['fixed_probe'] == pytest.approx(expected)


def test_reference_formulas_differ_beyond_three_parties():
    reference = ghz_reference_thresholds(2, 4)
    assert reference['three_party_formula'] == pytest.approx(3 / 11)
    assert reference['fixed_probe'] == pytest.approx(7 / 15)


def test_ppt_threshold(controller):
    for part in ('1', '2', None):
        value = controller.threshold(StateFamily('ghz', d=2, n=3), 'p', 0.0, 1.0, 'PPT', tol=1e-6, part=part)
        assert value == pytest.approx(0.2, abs=1e-6)


def test_threshold_bracket_error(controller):
    from utils.error_handler import BracketError
    with pytest.raises(BracketError):
        controller.threshold(StateFamily('ghz', d=2, n=3), 'p', 0.5, 1.0, 'II')


# oracle check

def test_oracle_check_summary(controller):
    summary = controller.oracle_check(3, 2, 2, trials=10, seed=1)
    assert summary['passed']
    assert summary['cases'] == 10


@pytest.mark.slow
def test_full_ghz_w_grid_runtime():
    controller = ScanController(workers=4)
    start = time.perf_counter()
    result = controller.scan(ghz_w_spec('0:1:0.01,0:1:0.01', workers=4))
    assert len(result) == 101 * 102 // 2
    assert time.perf_counter() - start < 60
