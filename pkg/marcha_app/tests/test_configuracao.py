"""
Tests for run configuration loading and validation.
"""
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from marcha_app.core.configuracao import (
    carregar_configuracao,
    emitir_configuracao,
    emitir_marcha,
    substituir_valores,
)
from marcha_app.core.constantes import ModoImpulso
from marcha_app.core.excecoes import ExcecaoConfiguracao, ExcecaoDadosInvalidos
from marcha_app.dominio import ParametrosVhc


class ConfiguracaoTest(SimpleTestCase):
    """Tests for carregar_configuracao and the INI writers."""

    def setUp(self):
        """Set up a scratch directory."""
        self.temporario = tempfile.TemporaryDirectory()
        self.diretorio = Path(self.temporario.name)

    def tearDown(self):
        self.temporario.cleanup()

    def _escrever(self, texto: str, nome: str = 'config.ini') -> str:
        caminho = self.diretorio / nome
        caminho.write_text(texto, encoding='utf-8')
        return str(caminho)

    def test_padroes_cinco_elos(self):
        """Test defaults describe the five-link case study."""
        configuracao = carregar_configuracao()
        self.assertEqual(configuracao.bipede.n, 5)
        self.assertAlmostEqual(configuracao.bipede.massa_total, 2.25)
        self.assertEqual(configuracao.vhc.theta1_i, math.pi / 8)
        self.assertEqual(configuracao.ancora, (math.pi / 8, -5 * math.pi / 3))
        self.assertEqual(configuracao.livres, ('G2', 'G4', 'G5', 'a5'))
        self.assertEqual(configuracao.secao.q2_estrela, math.pi / 16)
        self.assertEqual(configuracao.simulacao.modo_impulso, ModoImpulso.IDEAL)

        limite = math.pi / 8 + 0.1
        self.assertEqual(configuracao.intervalo, (-limite, limite))

    def test_pesos_icpm(self):
        """Test Q = blockdiag(I4, 1.5 I5) and R = I4."""
        configuracao = carregar_configuracao()
        np.testing.assert_array_equal(np.diag(configuracao.peso_q), [1.0] * 4 + [1.5] * 5)
        np.testing.assert_array_equal(configuracao.peso_r, np.eye(4))
        np.testing.assert_array_equal(configuracao.ganhos.kp, 750.0 * np.eye(4))

    def test_sobrepor_arquivo(self):
        """Test INI keys override the defaults."""
        caminho = self._escrever("[sim]\nsteps = 7\n\n[controller]\nmode = highgain\n")
        configuracao = carregar_configuracao(caminho)
        self.assertEqual(configuracao.simulacao.numero_passos, 7)
        self.assertEqual(configuracao.simulacao.modo_impulso, ModoImpulso.ALTO_GANHO)

    def test_secao_e_chave_desconhecidas(self):
        """Test unknown sections and keys are rejected by name."""
        test_cases = [
            ("[foo]\nbar = 1\n", "[foo]"),
            ("[sim]\nbogus = 1\n", "[sim].bogus"),
        ]

        for texto, esperado in test_cases:
            with self.assertRaises(ExcecaoConfiguracao) as contexto:
                carregar_configuracao(self._escrever(texto))
            self.assertIn(esperado, str(contexto.exception))

    def test_valores_invalidos(self):
        """Test values that cannot be parsed or fall outside their domain."""
        test_cases = [
            "[sim]\nsteps = abc\n",
            "[sim]\nsteps = 0\n",
            "[controller]\nmode = turbo\n",
            "[icpm]\nq2_section = 1.0\n",
            "[icpm]\nworkers = 0\n",
            "[vhc]\nfree = k2, G4\n",
            "[orbit]\nmargin = -0.1\n",
        ]

        for texto in test_cases:
            with self.assertRaises(ExcecaoConfiguracao, msg=f"Failed for input: {texto!r}"):
                carregar_configuracao(self._escrever(texto))

    def test_bipede_invalido(self):
        """Test physical validation of the biped parameters."""
        test_cases = [
            "[biped]\nn = 4\n",
            "[biped]\nm = 0.4, 0.45, 0.55, 0.45, 0.5\n",
            "[biped]\nell = 0.5, 0.55, 0.6, 0.55\n",
            "[sim]\nrtol = 0\n",
        ]

        for texto in test_cases:
            with self.assertRaises(ExcecaoDadosInvalidos, msg=f"Failed for input: {texto!r}"):
                carregar_configuracao(self._escrever(texto))

    def test_arquivo_inexistente(self):
        """Test missing configuration file."""
        with self.assertRaises(ExcecaoConfiguracao):
            carregar_configuracao(str(self.diretorio / 'nao_existe.ini'))

    def test_configuracao_efetiva_reproduz_valores(self):
        """Test the effective configuration reloads to identical values."""
        original = carregar_configuracao(self._escrever("[icpm]\nr = 0.3\n"))
        caminho = self._escrever(emitir_configuracao(original), 'efetiva.ini')
        relida = carregar_configuracao(caminho)

        for secao, chaves in original.valores.items():
            self.assertEqual(relida.valores[secao], chaves, f"Failed for section: {secao}")

    def test_arquivo_de_marcha(self):
        """Test a gait file overlays the [vhc] parameters."""
        parametros = ParametrosVhc(
            a=(0.55, 0.0, -0.55, -1.7),
            k=(0, 0, 1, 1),
            g=(0.27, -0.4, 0.13, -0.38),
            h=(8.0, 8.0, 8.0, 10.0),
            theta1_i=0.39,
        )
        marcha = self._escrever(emitir_marcha(parametros), 'marcha.ini')
        configuracao = carregar_configuracao(self._escrever(f"[vhc]\nfile = {marcha}\n"))

        np.testing.assert_array_equal(configuracao.vhc.a, parametros.a)
        np.testing.assert_array_equal(configuracao.vhc.g, parametros.g)
        self.assertEqual(configuracao.vhc.theta1_i, 0.39)

    def test_arquivo_de_marcha_chave_desconhecida(self):
        """Test a gait file may only carry gait keys."""
        marcha = self._escrever("[vhc]\nrefine = false\n", 'marcha.ini')
        with self.assertRaises(ExcecaoConfiguracao):
            carregar_configuracao(self._escrever(f"[vhc]\nfile = {marcha}\n"))

    def test_substituir_valores(self):
        """Test command-line overrides rebuild the configuration."""
        configuracao = substituir_valores(
            carregar_configuracao(), sim={'steps': 3, 'perturb': 0.01}, output={'dir': 'outra'}
        )
        self.assertEqual(configuracao.simulacao.numero_passos, 3)
        self.assertEqual(configuracao.simulacao.perturbacao, 0.01)
        self.assertEqual(configuracao.diretorio_saida, Path('outra'))

        with self.assertRaises(ExcecaoConfiguracao):
            substituir_valores(configuracao, sim={'passos': 3})
