"""
Serviço construtor de relatório - Textos e tabelas de saída.
Seguindo Single Responsibility: apenas formatação de relatórios e gravação de CSV.
"""
from pathlib import Path
from typing import Dict, Iterable, List

import numpy as np

from marcha_app.core.constantes import FORMATO_CSV
from marcha_app.core.utilitarios import salvar_csv
from marcha_app.dominio import (
    ControladorIcpm,
    RegistroPasso,
    RegistroTrajetoria,
    VerificacaoInvariante,
)

ROTULOS_RESUMO = {
    'passos': 'Passos completados',
    'tempo_total': 'Tempo total (s)',
    'periodo_medio': 'Período médio do passo (s)',
    'comprimento_medio': 'Comprimento médio do passo (m)',
    'velocidade_media': 'Velocidade média (m/s)',
    'norma_erro_final': '||e|| no último passo',
    'impulso_maximo_final': 'max ||I|| nos últimos passos',
    'impulso_solo_maximo_final': 'max ||I_g|| nos últimos passos',
    'falha': 'Falha',
}


class ConstrutorRelatorio:
    """Serviço para construir relatórios e tabelas."""

    @staticmethod
    def linhas_verificacoes(verificacoes: Iterable[VerificacaoInvariante]) -> List[str]:
        """Uma linha por verificação: situação, nome, valor medido e limite."""
        linhas = []
        for verificacao in verificacoes:
            situacao = 'OK  ' if verificacao.aprovado else 'FALHA'
            linha = f"[{situacao}] {verificacao.nome}: {verificacao.valor:.3e} (limite {verificacao.limite:.1e})"
            if verificacao.detalhe:
                linha += f" - {verificacao.detalhe}"
            linhas.append(linha)
        return linhas

    @staticmethod
    def linhas_residuos(residuos: np.ndarray, minimo_regularidade: float) -> List[str]:
        """Relatório de resíduos das restrições de marcha e da regularidade."""
        linhas = [f"r[{indice + 1}] = {valor: .3e}" for indice, valor in enumerate(residuos)]
        linhas.append(f"||r||_inf = {np.max(np.abs(residuos)):.3e}")
        linhas.append(f"min |M12^T Phi' + M22| = {minimo_regularidade:.6g}")
        return linhas

    @staticmethod
    def linhas_phi(inclinacoes: np.ndarray, deslocamentos: np.ndarray, termos: tuple) -> List[str]:
        """Phi em forma legível, uma componente por linha."""
        linhas = []
        for indice, (inclinacao, deslocamento, senoides) in enumerate(zip(inclinacoes, deslocamentos, termos)):
            partes = [f"{inclinacao:+.4f} q2"]
            if deslocamento:
                partes.append(f"{deslocamento / np.pi:+.0f} pi")
            partes += [f"{amplitude:+.4f} sin({frequencia:g} q2)" for amplitude, frequencia in senoides]
            linhas.append(f"Phi_{indice + 1}(q2) = " + " ".join(partes))
        return linhas

    @staticmethod
    def linhas_autovalores(controlador: ControladorIcpm, posto: int) -> List[str]:
        """Autovalores de malha aberta e fechada com raios espectrais."""
        def formatar(autovalores: np.ndarray) -> str:
            ordenados = sorted(autovalores, key=abs, reverse=True)
            return ", ".join(f"{valor.real:.4f}{valor.imag:+.4f}j" for valor in ordenados)

        return [
            f"Posto de controlabilidade: {posto} de {controlador.a.shape[0]}",
            f"Autovalores de A: {formatar(controlador.autovalores_malha_aberta)}",
            f"Raio espectral de A: {controlador.raio_espectral_malha_aberta:.6f}",
            f"Autovalores de A + BK: {formatar(controlador.autovalores_malha_fechada)}",
            f"Raio espectral de A + BK: {controlador.raio_espectral_malha_fechada:.6f}",
        ]

    @staticmethod
    def linhas_resumo(resumo: Dict[str, object]) -> List[str]:
        linhas = []
        for chave, rotulo in ROTULOS_RESUMO.items():
            if chave not in resumo or resumo[chave] is None:
                continue
            valor = resumo[chave]
            texto = f"{valor:.6g}" if isinstance(valor, float) else str(valor)
            linhas.append(f"{rotulo}: {texto}")
        return linhas

    @staticmethod
    def cabecalho_trajetoria(n: int) -> List[str]:
        return (
            ['t']
            + [f'theta{j}' for j in range(1, n + 1)]
            + ['q2'] + [f'q1_{j}' for j in range(1, n)]
            + ['dq2'] + [f'dq1_{j}' for j in range(1, n)]
            + [f'rho{j}' for j in range(1, n)]
            + [f'drho{j}' for j in range(1, n)]
            + ['E']
        )

    @staticmethod
    def cabecalho_passos(n: int) -> List[str]:
        return ['k', 'dur', 'norm_e'] + [f'I_{j}' for j in range(1, n)] + ['Ig_x', 'Ig_y', 'dT_impact']

    @staticmethod
    def gravar_trajetoria(caminho: Path, trajetoria: RegistroTrajetoria, n: int) -> None:
        """CSV da trajetória amostrada."""
        linhas = np.column_stack([
            trajetoria.tempos,
            trajetoria.theta.reshape(-1, n),
            trajetoria.q[:, -1:].reshape(-1, 1),
            trajetoria.q[:, :-1].reshape(-1, n - 1),
            trajetoria.dq[:, -1:].reshape(-1, 1),
            trajetoria.dq[:, :-1].reshape(-1, n - 1),
            trajetoria.rho.reshape(-1, n - 1),
            trajetoria.drho.reshape(-1, n - 1),
            trajetoria.energia,
        ])
        salvar_csv(caminho, ConstrutorRelatorio.cabecalho_trajetoria(n), linhas, FORMATO_CSV)

    @staticmethod
    def gravar_passos(caminho: Path, registros: List[RegistroPasso], n: int) -> None:
        """CSV com um registro por passo."""
        linhas = [
            [registro.k, registro.duracao, registro.norma_erro]
            + list(registro.impulso)
            + list(registro.impulso_solo)
            + [registro.variacao_energia_cinetica]
            for registro in registros
        ]
        cabecalho = ConstrutorRelatorio.cabecalho_passos(n)
        salvar_csv(caminho, cabecalho, np.array(linhas, dtype=float).reshape(-1, len(cabecalho)), FORMATO_CSV)
