"""
Carregamento da configuração de execução.

Os padrões vêm de settings.MARCHA_SETTINGS; um arquivo INI opcional sobrescreve
seções e chaves (em minúsculas). O resultado é validado e convertido nos tipos de domínio.
"""
import configparser
import copy
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Dict, Any

import numpy as np
from django.conf import settings

from marcha_app.core.constantes import ModoImpulso
from marcha_app.core.excecoes import ExcecaoConfiguracao
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.core import validadores
from marcha_app.dominio import (
    ParametrosBipede,
    ParametrosVhc,
    GanhosContinuos,
    ConfigAltoGanho,
    Secao,
    ConfigSimulacao,
)

logger = logging.getLogger(__name__)

CHAVES_MARCHA = ('a', 'k', 'g', 'h', 'theta1_i')


@dataclass(frozen=True, eq=False)
class ConfiguracaoExecucao:
    """Configuração completa de uma execução, já validada."""
    valores: Dict[str, Dict[str, Any]]
    bipede: ParametrosBipede
    vhc: ParametrosVhc
    refinar: bool
    livres: Tuple[str, ...]
    ancora: Tuple[float, float]
    margem: float
    ganhos: GanhosContinuos
    alto_ganho: ConfigAltoGanho
    secao: Secao
    peso_q: np.ndarray
    peso_r: np.ndarray
    delta_z: float
    delta_i: float
    processos: int
    simulacao: ConfigSimulacao
    diretorio_saida: Path

    @property
    def intervalo(self) -> Tuple[float, float]:
        """Intervalo de operação de q2, simétrico em torno de zero."""
        limite = abs(self.vhc.theta1_i) + self.margem
        return -limite, limite


def carregar_configuracao(caminho: Optional[str] = None) -> ConfiguracaoExecucao:
    """
    Lê a configuração de execução.

    Args:
        caminho: Arquivo INI (opcional); sem arquivo usa apenas os padrões

    Returns:
        ConfiguracaoExecucao validada

    Raises:
        ExcecaoConfiguracao: Arquivo ilegível, seção/chave desconhecida ou valor não interpretável
        ExcecaoDadosInvalidos: Valores fora do domínio físico
    """
    valores = _valores_padrao()
    if caminho:
        _sobrepor_arquivo(valores, Path(caminho))

    arquivo_marcha = valores['vhc']['file']
    if arquivo_marcha:
        _sobrepor_marcha(valores, Path(arquivo_marcha))

    configuracao = _construir(valores)
    registrar_evento(
        "info",
        "Configuração carregada",
        logger,
        arquivo=str(caminho) if caminho else None,
        arquivo_marcha=arquivo_marcha or None
    )
    return configuracao


def emitir_configuracao(configuracao: ConfiguracaoExecucao) -> str:
    """
    Serializa a configuração efetiva como INI.

    Os números usam repr(), então reler o texto reproduz exatamente os mesmos valores.
    """
    linhas = []
    for secao, chaves in configuracao.valores.items():
        linhas.append(f"[{secao}]")
        for chave, valor in chaves.items():
            linhas.append(f"{chave} = {_formatar_valor(valor)}")
        linhas.append("")
    return "\n".join(linhas)


def emitir_marcha(parametros: ParametrosVhc) -> str:
    """Serializa parâmetros de VHC no formato do arquivo de marcha ([vhc])."""
    valores = {
        'a': tuple(float(valor) for valor in parametros.a),
        'k': tuple(int(valor) for valor in parametros.k),
        'g': tuple(float(valor) for valor in parametros.g),
        'h': tuple(float(valor) for valor in parametros.h),
        'theta1_i': float(parametros.theta1_i),
    }
    linhas = ["[vhc]"] + [f"{chave} = {_formatar_valor(valor)}" for chave, valor in valores.items()]
    return "\n".join(linhas) + "\n"


def _valores_padrao() -> Dict[str, Dict[str, Any]]:
    """Copia MARCHA_SETTINGS com seções e chaves em minúsculas."""
    return {
        secao.lower(): {chave.lower(): copy.deepcopy(valor) for chave, valor in chaves.items()}
        for secao, chaves in settings.MARCHA_SETTINGS.items()
    }


def _ler_ini(caminho: Path) -> configparser.ConfigParser:
    leitor = configparser.ConfigParser()
    try:
        with open(caminho, encoding='utf-8') as arquivo:
            leitor.read_file(arquivo)
    except FileNotFoundError as e:
        raise ExcecaoConfiguracao(f"Arquivo não encontrado: {caminho}") from e
    except (OSError, configparser.Error) as e:
        registrar_evento("error", f"Falha ao ler {caminho}", logger, erro=str(e))
        raise ExcecaoConfiguracao(f"Arquivo de configuração ilegível {caminho}: {e}") from e
    return leitor


def _sobrepor_arquivo(valores: Dict[str, Dict[str, Any]], caminho: Path) -> None:
    leitor = _ler_ini(caminho)
    for secao in leitor.sections():
        if secao not in valores:
            raise ExcecaoConfiguracao(f"Seção desconhecida [{secao}]")
        for chave, texto in leitor.items(secao):
            if chave not in valores[secao]:
                raise ExcecaoConfiguracao(f"Chave desconhecida [{secao}].{chave}")
            valores[secao][chave] = _interpretar(texto, valores[secao][chave], f"[{secao}].{chave}")


def _sobrepor_marcha(valores: Dict[str, Dict[str, Any]], caminho: Path) -> None:
    """Aplica um arquivo de marcha gerado por 'gait solve'."""
    leitor = _ler_ini(caminho)
    if not leitor.has_section('vhc'):
        raise ExcecaoConfiguracao(f"Arquivo de marcha sem seção [vhc]: {caminho}")
    for chave, texto in leitor.items('vhc'):
        if chave not in CHAVES_MARCHA:
            raise ExcecaoConfiguracao(f"Chave desconhecida no arquivo de marcha [vhc].{chave}")
        valores['vhc'][chave] = _interpretar(texto, valores['vhc'][chave], f"[vhc].{chave}")


def _interpretar(texto: str, padrao: Any, caminho_chave: str) -> Any:
    """
    Converte o texto para o tipo do valor padrão.

    Raises:
        ExcecaoConfiguracao: Se o texto não puder ser interpretado
    """
    texto = texto.strip()
    try:
        if isinstance(padrao, bool):
            return _interpretar_booleano(texto)
        if isinstance(padrao, int):
            return int(texto)
        if isinstance(padrao, float):
            return float(texto)
        if isinstance(padrao, tuple):
            itens = [item.strip() for item in texto.split(',') if item.strip()]
            if padrao and isinstance(padrao[0], str):
                return tuple(itens)
            if padrao and isinstance(padrao[0], int) and not isinstance(padrao[0], bool):
                return tuple(int(item) for item in itens)
            return tuple(float(item) for item in itens)
        return texto
    except ValueError as e:
        raise ExcecaoConfiguracao(f"Valor inválido para {caminho_chave}: '{texto}'") from e


def _interpretar_booleano(texto: str) -> bool:
    normalizado = texto.lower()
    if normalizado in ('1', 'true', 'yes', 'on', 'sim'):
        return True
    if normalizado in ('0', 'false', 'no', 'off', 'nao', 'não'):
        return False
    raise ValueError(texto)


def _formatar_valor(valor: Any) -> str:
    if isinstance(valor, bool):
        return 'true' if valor else 'false'
    if isinstance(valor, tuple):
        return ', '.join(_formatar_valor(item) for item in valor)
    if isinstance(valor, float):
        return repr(valor)
    return str(valor)


def _construir(valores: Dict[str, Dict[str, Any]]) -> ConfiguracaoExecucao:
    """Monta e valida os tipos de domínio a partir dos valores efetivos."""
    bipede_cfg = valores['biped']
    n = bipede_cfg['n']
    validadores.validar_parametros_bipede(
        n, bipede_cfg['ell'], bipede_cfg['d'], bipede_cfg['m'], bipede_cfg['j'], bipede_cfg['g']
    )
    bipede = ParametrosBipede(
        n=n,
        comprimentos=bipede_cfg['ell'],
        distancias_com=bipede_cfg['d'],
        massas=bipede_cfg['m'],
        inercias=bipede_cfg['j'],
        gravidade=bipede_cfg['g'],
    )

    vhc_cfg = valores['vhc']
    validadores.validar_parametros_vhc(
        n, vhc_cfg['a'], vhc_cfg['k'], vhc_cfg['g'], vhc_cfg['h'], vhc_cfg['theta1_i']
    )
    vhc = ParametrosVhc(
        a=vhc_cfg['a'], k=vhc_cfg['k'], g=vhc_cfg['g'], h=vhc_cfg['h'], theta1_i=vhc_cfg['theta1_i']
    )
    nomes_validos = set(vhc.como_dicionario())
    desconhecidos = [nome for nome in vhc_cfg['free'] if nome not in nomes_validos or nome[0] in ('k', 'H')]
    if desconhecidos:
        raise ExcecaoConfiguracao(f"[vhc].free: parâmetros livres inválidos {desconhecidos}")

    orbita_cfg = valores['orbit']
    if orbita_cfg['margin'] < 0:
        raise ExcecaoConfiguracao("[orbit].margin não pode ser negativa")
    limite = abs(vhc.theta1_i) + orbita_cfg['margin']
    validadores.validar_intervalo(-limite, limite, "[orbit]")

    controle_cfg = valores['controller']
    identidade = np.eye(n - 1)
    ganhos = GanhosContinuos(kp=controle_cfg['kp'] * identidade, kd=controle_cfg['kd'] * identidade)
    validadores.validar_ganhos(ganhos.kp, ganhos.kd)
    alto_ganho = ConfigAltoGanho(
        lambda_=controle_cfg['lambda'] * identidade,
        mu=controle_cfg['mu'],
        tolerancia_parada=controle_cfg['stop_tol'],
    )
    validadores.validar_config_alto_ganho(alto_ganho.mu, alto_ganho.tolerancia_parada, alto_ganho.lambda_)
    try:
        modo = ModoImpulso(controle_cfg['mode'])
    except ValueError as e:
        raise ExcecaoConfiguracao(
            f"[controller].mode deve ser 'ideal' ou 'highgain', recebido '{controle_cfg['mode']}'"
        ) from e

    icpm_cfg = valores['icpm']
    if not -limite < icpm_cfg['q2_section'] < limite:
        raise ExcecaoConfiguracao("[icpm].q2_section fora do intervalo de operação")
    for chave in ('q_angles', 'q_velocities', 'r', 'delta_z', 'delta_i'):
        validadores.validar_positivo(icpm_cfg[chave], f"[icpm].{chave}")
    if icpm_cfg['workers'] < 1:
        raise ExcecaoConfiguracao("[icpm].workers deve ser >= 1")
    peso_q = np.diag(np.concatenate([
        np.full(n - 1, icpm_cfg['q_angles']),
        np.full(n, icpm_cfg['q_velocities']),
    ]))

    sim_cfg = valores['sim']
    for chave in ('rtol', 'atol', 'max_step', 'contact_tol', 'max_swing_time', 'sample_dt'):
        validadores.validar_positivo(sim_cfg[chave], f"[sim].{chave}")
    if sim_cfg['steps'] < 1:
        raise ExcecaoConfiguracao("[sim].steps deve ser >= 1")
    if sim_cfg['perturb'] < 0:
        raise ExcecaoConfiguracao("[sim].perturb não pode ser negativo")
    simulacao = ConfigSimulacao(
        rtol=sim_cfg['rtol'],
        atol=sim_cfg['atol'],
        passo_maximo=sim_cfg['max_step'],
        tolerancia_contato=sim_cfg['contact_tol'],
        duracao_maxima_balanco=sim_cfg['max_swing_time'],
        numero_passos=sim_cfg['steps'],
        intervalo_amostragem=sim_cfg['sample_dt'],
        modo_impulso=modo,
        icpm_ativo=sim_cfg['icpm'],
        semente=sim_cfg['seed'],
        perturbacao=sim_cfg['perturb'],
    )

    return ConfiguracaoExecucao(
        valores=valores,
        bipede=bipede,
        vhc=vhc,
        refinar=vhc_cfg['refine'],
        livres=tuple(vhc_cfg['free']),
        ancora=(orbita_cfg['q2'], orbita_cfg['dq2']),
        margem=orbita_cfg['margin'],
        ganhos=ganhos,
        alto_ganho=alto_ganho,
        secao=Secao(q2_estrela=icpm_cfg['q2_section']),
        peso_q=peso_q,
        peso_r=icpm_cfg['r'] * identidade,
        delta_z=icpm_cfg['delta_z'],
        delta_i=icpm_cfg['delta_i'],
        processos=icpm_cfg['workers'],
        simulacao=simulacao,
        diretorio_saida=Path(valores['output']['dir']),
    )


def substituir_valores(configuracao: ConfiguracaoExecucao, **sobrescritas: Dict[str, Any]) -> ConfiguracaoExecucao:
    """
    Reconstrói a configuração com chaves sobrescritas por seção (flags de linha de comando).

    Exemplo:
        substituir_valores(config, sim={'steps': 10}, output={'dir': 'x'})
    """
    valores = copy.deepcopy(configuracao.valores)
    for secao, chaves in sobrescritas.items():
        for chave, valor in chaves.items():
            if chave not in valores.get(secao, {}):
                raise ExcecaoConfiguracao(f"Chave desconhecida [{secao}].{chave}")
            valores[secao][chave] = valor
    return _construir(valores)
