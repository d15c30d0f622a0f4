from matchpool.verify import SUITES, run_all


def test_all_suites_pass(capsys):
    assert run_all(verbose=True)
    out = capsys.readouterr().out
    assert out.count("PASS") == len(SUITES)
